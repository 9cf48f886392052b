#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fpkit/manifest.hpp"
#include "fpkit/score_set.hpp"

namespace fpkit {

// Sorted integer score sample with right-continuous ECDF semantics.
struct EmpiricalDist {
    std::vector<int64_t> scores;  // ascending

    static EmpiricalDist from_values(std::vector<int64_t> v);
    size_t n() const { return scores.size(); }
    // #{s >= t}
    size_t count_at_or_above(int64_t t) const;
};

// For each print, up to per_print partners with a different identity,
// drawn without replacement. Sampling is seeded per print, so the draw
// for one print does not depend on the others.
PairList sample_imposter_pairs(const Manifest& m, int per_print, uint64_t seed);

// Every unordered same-identity pair, identities in first-appearance order.
PairList all_genuine_pairs(const Manifest& m);

EmpiricalDist subsample_scores(const std::vector<int64_t>& scores, size_t k,
                               uint64_t seed);
EmpiricalDist subsample_scores(const ScoreSet& s, size_t k, uint64_t seed);

// Fraction of the distribution at or above t.
double far_at_threshold(const EmpiricalDist& d, int64_t t);
double tpr_at_threshold(const EmpiricalDist& d, int64_t t);

struct ThresholdResult {
    int64_t threshold = 0;
    double achieved_far = 0.0;
};

// Smallest integer threshold whose FAR on `imposter` is <= target_far.
ThresholdResult select_threshold(const EmpiricalDist& imposter, double target_far);

struct KsResult {
    double d = 0.0;  // sup_x (Fa(x) - Fb(x))
    double p = 1.0;
    size_t n = 0, m = 0;
};

// One-sided two-sample Kolmogorov-Smirnov test of "a is shifted toward
// lower values than b" (a stochastically smaller). p = exp(-2nmD^2/(n+m)).
KsResult ks_less(const EmpiricalDist& a, const EmpiricalDist& b);

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0;                // n-1 normalization
    std::optional<double> skewness;     // g1, population moments
    std::optional<double> ex_kurtosis;  // g2 = m4/m2^2 - 3
    size_t n = 0;
};

MetricSummary summarize(const std::vector<double>& values);

struct FeatureStats {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;  // n-1 normalization
};

// rows = observations, cols = features.
FeatureStats feature_stats(const Eigen::MatrixXd& rows);

// Frechet distance between Gaussians; the squared distance is
// |mu_a-mu_b|^2 + tr(A+B-2(AB)^{1/2}). Covariances must be symmetric PSD;
// eigenvalues below -1e-8 are an error, those above are clamped to 0.
double frechet_distance(const Eigen::VectorXd& mu_a, const Eigen::MatrixXd& cov_a,
                        const Eigen::VectorXd& mu_b, const Eigen::MatrixXd& cov_b);

// Numeric CSV, one observation per line; a single leading header line is
// skipped if its first field is not numeric.
Eigen::MatrixXd read_features_csv(const std::string& path);

struct HistBin {
    int64_t lo = 0;  // inclusive start, width-aligned
    size_t count = 0;
};

std::vector<HistBin> histogram(const EmpiricalDist& d, int64_t bin_width);

struct CdfPoint {
    int64_t x = 0;
    double f = 0.0;  // F(x), right-continuous
};

std::vector<CdfPoint> cdf_points(const EmpiricalDist& d);

}  // namespace fpkit
