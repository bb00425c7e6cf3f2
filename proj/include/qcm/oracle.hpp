// Copyright 2026 The qcm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Reference computations for verification only. None of them calls the
// generator or the time steppers they are compared with (except
// duality_check, whose purpose is to probe the engine's forward solution).

#include "qcm/evolution.hpp"

namespace qcm {

/// Phi_t(k) of the trivial system (dim 1, K = 0, R = 0, S = 1) in the
/// coherent field f: exp of the closed-form integral, by adaptive
/// Gauss-Kronrod quadrature on each piece between jumps. Throws
/// IntegrationError when the quadrature does not converge.
cplx system_free_charfunc(const ObservableSpec& spec, const FieldProfile& f, const TestFunction& k, double t);

/// rho(t) by dense superoperator exponentials, coefficients frozen at the
/// midpoint of each piece between jumps. Throws DomainError for dim > 12.
DenseMatrix dense_expm_propagate(const GeneratorContext& ctx, const DenseMatrix& rho0, double t);

/// |Tr{X~(0) tau} - Tr{X rho(t)}| where X~ solves the Heisenberg-side
/// equation backwards from X~(t) = X (dense RK4 with its own step control)
/// and rho(t) = propagate(ctx, tau, 0, t, cfg).
double duality_check(const GeneratorContext& ctx, double t, const SystemOperator& X, const DenseMatrix& tau,
                     const EvolutionConfig& cfg);

}  // namespace qcm
