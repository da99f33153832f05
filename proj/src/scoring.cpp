#include "wordprune/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "wordprune/parallel.hpp"

namespace wordprune {

namespace {

using boost::math::digamma;
using boost::math::trigamma;

struct Moments {
    double mean_x = 0.0;
    double var_x = 0.0;
    double mean_log = 0.0;
    double mean_log1m = 0.0;
    std::size_t clamped = 0;
};

Moments clamped_moments(std::span<const double> samples) {
    Moments m;
    const double lo = beta_clamp_epsilon, hi = 1.0 - beta_clamp_epsilon;
    const double n = static_cast<double>(samples.size());
    for (double v : samples) {
        const double x = std::clamp(v, lo, hi);
        if (x != v) ++m.clamped;
        m.mean_x += x;
        m.mean_log += std::log(x);
        m.mean_log1m += std::log1p(-x);
    }
    m.mean_x /= n;
    m.mean_log /= n;
    m.mean_log1m /= n;
    for (double v : samples) {
        const double d = std::clamp(v, lo, hi) - m.mean_x;
        m.var_x += d * d;
    }
    m.var_x /= n;
    return m;
}

} // namespace

BetaFit BetaFit::make(double alpha, double beta, std::size_t samples) {
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
        fail_numerical("Beta shapes must be positive and finite");
    }
    BetaFit f;
    f.alpha = alpha;
    f.beta = beta;
    f.samples = samples;
    return f;
}

BetaFit fit_beta(std::span<const double> samples, BetaFitMethod method) {
    if (samples.size() < 2) fail_data("Beta fit needs at least 2 samples");
    for (double v : samples) {
        if (!std::isfinite(v)) fail_data("Beta fit: non-finite sample");
    }
    const Moments mo = clamped_moments(samples);
    if (!(mo.var_x > 0.0)) fail_numerical("Beta fit: samples have zero variance after clamping (degenerate)");

    const double m = mo.mean_x;
    double common = m * (1.0 - m) / mo.var_x - 1.0;
    if (!(common > 0.0)) common = 0.5; // variance above the Beta bound; start from a U-shaped guess
    const double a0 = m * common, b0 = (1.0 - m) * common;

    BetaFit fit = BetaFit::make(a0, b0, samples.size());
    fit.clamped = mo.clamped;
    if (method == BetaFitMethod::moments) return fit;

    double a = a0, b = b0;
    constexpr int max_iter = 200;
    bool done = false;
    int it = 0;
    for (; it < max_iter && !done; ++it) {
        const double psi_ab = digamma(a + b);
        const double g1 = digamma(a) - psi_ab - mo.mean_log;
        const double g2 = digamma(b) - psi_ab - mo.mean_log1m;
        const double t_ab = trigamma(a + b);
        const double j11 = trigamma(a) - t_ab, j22 = trigamma(b) - t_ab, j12 = -t_ab;
        const double det = j11 * j22 - j12 * j12;
        if (!(std::abs(det) > 0.0) || !std::isfinite(det)) break;
        double da = -(j22 * g1 - j12 * g2) / det;
        double db = -(-j12 * g1 + j11 * g2) / det;
        // keep both shapes positive
        while (a + da <= 0.0 || b + db <= 0.0) {
            da *= 0.5;
            db *= 0.5;
        }
        a += da;
        b += db;
        if (!std::isfinite(a) || !std::isfinite(b)) break;
        done = std::abs(da) <= 1e-12 * a && std::abs(db) <= 1e-12 * b;
    }
    if (done) {
        fit.alpha = a;
        fit.beta = b;
    } else {
        fit.converged = false;
    }
    fit.iterations = static_cast<std::size_t>(it);
    return fit;
}

double beta_entropy(const BetaFit& fit) {
    const double a = fit.alpha, b = fit.beta;
    if (!(a > 0.0) || !(b > 0.0)) fail_numerical("Beta entropy of an invalid fit");
    const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    return log_beta - (a - 1.0) * digamma(a) - (b - 1.0) * digamma(b) + (a + b - 2.0) * digamma(a + b);
}

double beta_mixture_entropy(std::span<const BetaFit> fits, std::span<const double> weights) {
    if (fits.empty() || fits.size() != weights.size()) fail_data("Beta mixture: one weight per component is required");
    std::vector<double> log_norm;
    std::vector<double> cuts{0.0, 1.0};
    for (const auto& f : fits) {
        if (!(f.alpha > 0.0) || !(f.beta > 0.0)) fail_numerical("Beta mixture entropy of an invalid fit");
        log_norm.push_back(std::lgamma(f.alpha + f.beta) - std::lgamma(f.alpha) - std::lgamma(f.beta));
        const double s = f.alpha + f.beta;
        const double mean = f.alpha / s;
        const double sd = std::sqrt(f.alpha * f.beta / (s * s * (s + 1.0)));
        for (double k : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) {
            const double c = mean + k * sd;
            if (c > 0.0 && c < 1.0) cuts.push_back(c);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto integrand = [&](double x) {
        if (!(x > 0.0 && x < 1.0)) return 0.0;
        const double lx = std::log(x), l1x = std::log1p(-x);
        double m = 0.0;
        for (std::size_t c = 0; c < fits.size(); ++c) {
            if (weights[c] <= 0.0) continue;
            m += weights[c] * std::exp(log_norm[c] + (fits[c].alpha - 1.0) * lx + (fits[c].beta - 1.0) * l1x);
        }
        return m > 0.0 && std::isfinite(m) ? -m * std::log(m) : 0.0;
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    double h = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] < 1e-15) continue;
        h += ts.integrate(integrand, cuts[i], cuts[i + 1], 1e-10);
    }
    if (!std::isfinite(h)) fail_numerical("Beta mixture entropy did not converge");
    return h;
}

std::string to_string(MarginalModel m) { return m == MarginalModel::beta_fit ? "beta-fit" : "class-mixture"; }

MarginalModel parse_marginal_model(const std::string& name) {
    if (name == "class-mixture") return MarginalModel::class_mixture;
    if (name == "beta-fit") return MarginalModel::beta_fit;
    fail_usage("unknown marginal model '" + name + "' (expected class-mixture or beta-fit)");
}

MutualInformation mutual_information(std::span<const double> values, std::span<const std::size_t> class_of,
                                     std::size_t num_classes, MarginalModel marginal) {
    if (values.size() != class_of.size()) fail_data("mutual information: one label per value is required");
    std::vector<std::vector<double>> by_class(num_classes);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (class_of[i] >= num_classes) fail_data("mutual information: class position out of range");
        by_class[class_of[i]].push_back(values[i]);
    }
    for (const auto& c : by_class) {
        if (c.size() < 2) fail_data("mutual information needs at least 2 samples per class");
    }

    MutualInformation mi;
    try {
        mi.marginal = fit_beta(values);
        if (num_classes == 1) {
            mi.per_class.push_back(mi.marginal);
            return mi; // marginal is the only conditional
        }
        double conditional = 0.0;
        std::vector<double> priors;
        for (const auto& c : by_class) {
            mi.per_class.push_back(fit_beta(c));
            priors.push_back(static_cast<double>(c.size()) / static_cast<double>(values.size()));
            conditional += priors.back() * beta_entropy(mi.per_class.back());
        }
        const double h = marginal == MarginalModel::beta_fit ? beta_entropy(mi.marginal)
                                                             : beta_mixture_entropy(mi.per_class, priors);
        mi.value = h - conditional;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::numerical) throw;
        mi.value = 0.0;
        mi.degenerate = true;
    }
    return mi;
}

MutualInformation mutual_information(std::span<const double> values, std::span<const std::string> labels,
                                     MarginalModel marginal) {
    std::map<std::string, std::size_t> pos;
    for (const auto& l : labels) pos.emplace(l, 0);
    std::size_t next = 0;
    for (auto& [name, p] : pos) p = next++;
    std::vector<std::size_t> class_of;
    class_of.reserve(labels.size());
    for (const auto& l : labels) class_of.push_back(pos.at(l));
    return mutual_information(values, class_of, pos.size(), marginal);
}

ScoreReport max_relevance(const RepresentationMatrix& reps, MarginalModel marginal) {
    ScoreReport r;
    r.words = reps.active_words();
    std::map<std::string, std::size_t> pos;
    for (const auto& l : reps.labels()) pos.emplace(l, 0);
    if (pos.size() < 2) fail_data("maximum relevance needs at least 2 classes");
    std::size_t next = 0;
    for (auto& [name, p] : pos) {
        p = next++;
        r.classes.push_back(name);
    }
    const std::size_t n = reps.size();
    std::vector<std::size_t> class_of(n);
    r.class_priors.assign(pos.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        class_of[i] = pos.at(reps.labels()[i]);
        r.class_priors[class_of[i]] += 1.0 / static_cast<double>(n);
    }

    const std::size_t bins = reps.active_words().size();
    std::vector<MutualInformation> per(bins);
    parallel_for(bins, [&](std::size_t k) {
        std::vector<double> column(n);
        for (std::size_t i = 0; i < n; ++i) column[i] = reps.values()(i, k);
        per[k] = mutual_information(column, class_of, pos.size(), marginal);
    });

    double sum = 0.0;
    for (const auto& mi : per) {
        r.per_bin.push_back(mi.value);
        r.degenerate.push_back(mi.degenerate);
        r.marginal_fits.push_back(mi.marginal);
        r.class_fits.push_back(mi.per_class);
        if (mi.degenerate) ++r.degenerate_bins;
        r.clamped_values += mi.marginal.clamped;
        sum += mi.value;
    }
    r.score = sum / static_cast<double>(bins);
    return r;
}

} // namespace wordprune
