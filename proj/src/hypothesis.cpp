#include "optreg/hypothesis.hpp"

#include <cmath>

#include "optreg/errors.hpp"

namespace optreg {

std::string to_string(Decision d) {
  return d == Decision::accept_h0 ? "accept_H0" : "accept_H1";
}

double required_H(double delta, double epsilon, double xi_mean) {
  if (!(delta > 0.0 && epsilon > 0.0 && xi_mean > 0.0))
    throw DomainError("required_H: delta, epsilon and xi must be positive");
  return 4.0 * xi_mean / (delta * delta * epsilon);
}

TestConfig TestConfig::with_required_H(double delta, double epsilon, double xi_mean) {
  TestConfig c{delta, epsilon, xi_mean, required_H(delta, epsilon, xi_mean)};
  c.validate();
  return c;
}

void TestConfig::validate() const {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  if (!(xi_mean >= 0.0)) throw DomainError("xi must be nonnegative");
  if (!(H > 0.0)) throw DomainError("H must be positive");
}

std::optional<double> phi_H(const LadlagPath& X, const BilinearIntegrand& f,
                            const Integrator& a, double H, EstimatorForm form) {
  SequentialResult r = sequential_ls(X, f, a, H, form);
  if (!r.available()) return std::nullopt;
  return r.theta_hat;
}

Decision decide(double phi, double delta) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  return std::abs(phi) >= delta / 2.0 ? Decision::accept_h0 : Decision::accept_h1;
}

std::optional<TestOutcome> run_test(const LadlagPath& X, const BilinearIntegrand& f,
                                    const Integrator& a, const TestConfig& config,
                                    EstimatorForm form) {
  config.validate();
  SequentialResult r = sequential_ls(X, f, a, config.H, form);
  if (!r.available()) return std::nullopt;
  return TestOutcome{r.theta_hat, decide(r.theta_hat, config.delta), r};
}

}  // namespace optreg
