#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pslife/core.hpp"

namespace pslife {

// Parameters of log m(x) = alpha + beta * x fitted to one (season, sex).
struct GompertzFit {
    double alpha = 0.0;
    double beta = 0.0;
    double deviance = 0.0;  // Poisson deviance at the reported parameters
    int iterations = 0;
    bool converged = false;
};

struct FitOptions {
    double tolerance = 1e-10;  // on both the deviance change and the step
    int max_iterations = 100;
};

// Raised when IRLS runs out of iterations; carries the last iterate and the
// deviance trace so callers can report how the fit was failing.
class FitNonConvergence : public std::runtime_error {
public:
    FitNonConvergence(std::string what, GompertzFit last_iterate,
                      std::vector<double> trace)
        : std::runtime_error(std::move(what)),
          last(last_iterate),
          deviance_trace(std::move(trace)) {}

    GompertzFit last;
    std::vector<double> deviance_trace;
};

// Cells selected for fitting: age-group midpoints with lower bound >=
// age_floor, the open-ended group excluded (its midpoint is nominal).
struct FitData {
    std::vector<double> deaths;
    std::vector<double> exposure;  // person-years
    std::vector<double> ages;      // midpoints, years
};

FitData gompertz_cells(const MortalitySurface& surface, const Pseudoseason& season,
                       Sex sex, int age_floor = 45);

// Maximum-likelihood fit of deaths ~ Poisson(exposure * exp(alpha + beta*age))
// via iteratively reweighted least squares on the 2x2 normal equations,
// started from an ordinary least-squares line through log((deaths+0.5)/exposure).
// Needs >= 2 distinct ages, positive exposures, non-negative deaths with a
// positive total. Throws FitNonConvergence after max_iterations.
GompertzFit fit_gompertz(std::span<const double> deaths,
                         std::span<const double> exposure,
                         std::span<const double> ages, const FitOptions& = {});

inline GompertzFit fit_gompertz(const FitData& data, const FitOptions& opt = {}) {
    return fit_gompertz(data.deaths, data.exposure, data.ages, opt);
}

// Fitted hazard at an exact age, per person-year.
double predict_mx(const GompertzFit& fit, double age);

// Age at which `to` reaches the hazard `from` has at age `age`:
//   (from.alpha - to.alpha + from.beta * age) / to.beta.
// Affine in age; composing the two directions returns the input age.
double equivalent_age(const GompertzFit& from, const GompertzFit& to, double age);

struct EquivalenceRow {
    double age = 0.0;             // reference age, years
    double summer_mx = 0.0;       // per person-year
    double winter_equiv_age = 0.0;  // winter age with the summer hazard at `age`
    double winter_mx = 0.0;       // per person-year
    double summer_equiv_age = 0.0;  // summer age with the winter hazard at `age`
};

std::vector<EquivalenceRow> equivalence_table(const GompertzFit& summer,
                                              const GompertzFit& winter,
                                              std::span<const double> ages);

}  // namespace pslife
