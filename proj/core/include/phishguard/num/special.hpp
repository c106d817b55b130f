#pragma once

namespace phishguard::num {

/* Digamma for x > 0: recurrence up to x >= 6, then the asymptotic
   Bernoulli series. Absolute error below 1e-12 over the range the
   Dirichlet head produces. */
double digamma(double x);

}  // namespace phishguard::num
