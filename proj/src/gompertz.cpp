#include "pslife/gompertz.hpp"

#include <algorithm>
#include <cmath>

namespace pslife {

namespace {

double clamped_exp(double eta) {
    // Keeps a wild intermediate iterate from overflowing to inf; the fit
    // either recovers or fails the iteration cap with finite numbers.
    return std::exp(std::clamp(eta, -700.0, 700.0));
}

double poisson_deviance(std::span<const double> deaths,
                        std::span<const double> exposure, double alpha,
                        double beta, std::span<const double> ages) {
    double dev = 0.0;
    for (std::size_t i = 0; i < deaths.size(); ++i) {
        const double mu = exposure[i] * clamped_exp(alpha + beta * ages[i]);
        const double d = deaths[i];
        const double dlog = d > 0.0 ? d * std::log(d / mu) : 0.0;  // 0*log(0) = 0
        dev += 2.0 * (dlog - (d - mu));
    }
    return dev;
}

}  // namespace

FitData gompertz_cells(const MortalitySurface& surface, const Pseudoseason& season,
                       Sex sex, int age_floor) {
    const auto& slice = surface.slice(season, sex);
    FitData data;
    for (const auto& g : age_groups()) {
        if (g.open_ended || g.lower < static_cast<double>(age_floor)) continue;
        data.deaths.push_back(static_cast<double>(slice.deaths[g.index]));
        data.exposure.push_back(slice.exposure[g.index]);
        data.ages.push_back(g.midpoint());
    }
    return data;
}

GompertzFit fit_gompertz(std::span<const double> deaths,
                         std::span<const double> exposure,
                         std::span<const double> ages, const FitOptions& opt) {
    const std::size_t n = deaths.size();
    if (exposure.size() != n || ages.size() != n) {
        throw std::invalid_argument("fit_gompertz: input spans differ in length");
    }
    if (n < 2) {
        throw std::invalid_argument("fit_gompertz: need at least two cells");
    }
    double total_deaths = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(exposure[i] > 0.0)) {
            throw std::invalid_argument("fit_gompertz: non-positive exposure");
        }
        if (deaths[i] < 0.0) {
            throw std::invalid_argument("fit_gompertz: negative deaths");
        }
        total_deaths += deaths[i];
    }
    if (!(total_deaths > 0.0)) {
        throw std::invalid_argument("fit_gompertz: all cells have zero deaths");
    }
    if (std::all_of(ages.begin(), ages.end(),
                    [&](double a) { return a == ages[0]; })) {
        throw std::invalid_argument("fit_gompertz: all cells share one age");
    }

    // Start from an OLS line through the empirical log rates; +0.5 keeps
    // zero-death cells finite.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = std::log((deaths[i] + 0.5) / exposure[i]);
        sx += ages[i];
        sy += y;
        sxx += ages[i] * ages[i];
        sxy += ages[i] * y;
    }
    const double dn = static_cast<double>(n);
    double beta = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
    double alpha = (sy - beta * sx) / dn;

    GompertzFit fit;
    std::vector<double> trace;
    double prev_dev = poisson_deviance(deaths, exposure, alpha, beta, ages);
    trace.push_back(prev_dev);

    for (int iter = 1; iter <= opt.max_iterations; ++iter) {
        // Weighted normal equations of the working model: weight mu, working
        // response eta + (d - mu)/mu.
        double s0 = 0.0, s1 = 0.0, s2 = 0.0, t0 = 0.0, t1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double eta = alpha + beta * ages[i];
            const double mu = exposure[i] * clamped_exp(eta);
            const double z = eta + (deaths[i] - mu) / mu;
            s0 += mu;
            s1 += mu * ages[i];
            s2 += mu * ages[i] * ages[i];
            t0 += mu * z;
            t1 += mu * ages[i] * z;
        }
        const double det = s0 * s2 - s1 * s1;
        if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
            throw FitNonConvergence(
                "fit_gompertz: singular normal equations at iteration " +
                    std::to_string(iter),
                GompertzFit{alpha, beta, prev_dev, iter, false}, trace);
        }
        const double new_alpha = (s2 * t0 - s1 * t1) / det;
        const double new_beta = (s0 * t1 - s1 * t0) / det;
        const double step =
            std::max(std::abs(new_alpha - alpha), std::abs(new_beta - beta));
        alpha = new_alpha;
        beta = new_beta;

        const double dev = poisson_deviance(deaths, exposure, alpha, beta, ages);
        trace.push_back(dev);
        fit.iterations = iter;
        if (std::abs(dev - prev_dev) < opt.tolerance || step < opt.tolerance) {
            fit.alpha = alpha;
            fit.beta = beta;
            fit.deviance = dev;
            fit.converged = true;
            return fit;
        }
        prev_dev = dev;
    }

    throw FitNonConvergence(
        "fit_gompertz: no convergence after " +
            std::to_string(opt.max_iterations) + " iterations (last deviance " +
            std::to_string(prev_dev) + ")",
        GompertzFit{alpha, beta, prev_dev, opt.max_iterations, false}, trace);
}

double predict_mx(const GompertzFit& fit, double age) {
    return std::exp(fit.alpha + fit.beta * age);
}

double equivalent_age(const GompertzFit& from, const GompertzFit& to, double age) {
    if (to.beta == 0.0) {
        throw std::invalid_argument("equivalent_age: target slope is zero");
    }
    return (from.alpha - to.alpha + from.beta * age) / to.beta;
}

std::vector<EquivalenceRow> equivalence_table(const GompertzFit& summer,
                                              const GompertzFit& winter,
                                              std::span<const double> ages) {
    std::vector<EquivalenceRow> rows;
    rows.reserve(ages.size());
    for (double age : ages) {
        EquivalenceRow row;
        row.age = age;
        row.summer_mx = predict_mx(summer, age);
        row.winter_equiv_age = equivalent_age(summer, winter, age);
        row.winter_mx = predict_mx(winter, age);
        row.summer_equiv_age = equivalent_age(winter, summer, age);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace pslife
