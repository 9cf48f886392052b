#include "fpkit/biostats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "fpkit/errors.hpp"
#include "fpkit/rng.hpp"

namespace fpkit {

EmpiricalDist EmpiricalDist::from_values(std::vector<int64_t> v) {
    std::sort(v.begin(), v.end());
    return EmpiricalDist{std::move(v)};
}

size_t EmpiricalDist::count_at_or_above(int64_t t) const {
    auto it = std::lower_bound(scores.begin(), scores.end(), t);
    return static_cast<size_t>(scores.end() - it);
}

PairList sample_imposter_pairs(const Manifest& m, int per_print,
                               uint64_t seed) {
    if (per_print <= 0) throw ValidationError("perPrint must be positive");
    const size_t n = m.entries.size();
    PairList pairs;
    std::vector<size_t> cand;
    for (size_t pi = 0; pi < n; ++pi) {
        cand.clear();
        for (size_t j = 0; j < n; ++j)
            if (m.entries[j].identity_id != m.entries[pi].identity_id)
                cand.push_back(j);
        if (cand.empty())
            throw std::runtime_error("no non-mated partners for print '" +
                                     m.entries[pi].print_id + "'");
        size_t take = std::min(cand.size(), static_cast<size_t>(per_print));
        if (take < cand.size()) {
            Rng rng = Rng::derive(seed, pi);
            for (size_t k = 0; k < take; ++k) {
                size_t r = k + static_cast<size_t>(rng.below(cand.size() - k));
                std::swap(cand[k], cand[r]);
            }
        }
        for (size_t k = 0; k < take; ++k)
            pairs.push_back({m.entries[pi].print_id, m.entries[cand[k]].print_id});
    }
    return pairs;
}

PairList all_genuine_pairs(const Manifest& m) {
    std::vector<std::string> order;
    std::unordered_map<std::string, std::vector<size_t>> groups;
    for (size_t i = 0; i < m.entries.size(); ++i) {
        auto& g = groups[m.entries[i].identity_id];
        if (g.empty()) order.push_back(m.entries[i].identity_id);
        g.push_back(i);
    }
    PairList pairs;
    for (const auto& id : order) {
        const auto& g = groups[id];
        for (size_t a = 0; a < g.size(); ++a)
            for (size_t b = a + 1; b < g.size(); ++b)
                pairs.push_back({m.entries[g[a]].print_id, m.entries[g[b]].print_id});
    }
    return pairs;
}

EmpiricalDist subsample_scores(const std::vector<int64_t>& scores, size_t k,
                               uint64_t seed) {
    if (k >= scores.size()) return EmpiricalDist::from_values(scores);
    std::vector<int64_t> v = scores;
    Rng rng(seed);
    for (size_t i = 0; i < k; ++i) {
        size_t r = i + static_cast<size_t>(rng.below(v.size() - i));
        std::swap(v[i], v[r]);
    }
    v.resize(k);
    return EmpiricalDist::from_values(std::move(v));
}

EmpiricalDist subsample_scores(const ScoreSet& s, size_t k, uint64_t seed) {
    return subsample_scores(scores_of(s), k, seed);
}

double far_at_threshold(const EmpiricalDist& d, int64_t t) {
    if (d.scores.empty()) throw std::runtime_error("empty score distribution");
    return static_cast<double>(d.count_at_or_above(t)) /
           static_cast<double>(d.n());
}

double tpr_at_threshold(const EmpiricalDist& d, int64_t t) {
    return far_at_threshold(d, t);
}

ThresholdResult select_threshold(const EmpiricalDist& imposter, double target_far) {
    if (imposter.scores.empty())
        throw std::runtime_error("empty score distribution");
    const auto& s = imposter.scores;
    if (far_at_threshold(imposter, s.front()) <= target_far)
        return {s.front(), far_at_threshold(imposter, s.front())};
    for (size_t i = 0; i < s.size();) {
        int64_t v = s[i];
        while (i < s.size() && s[i] == v) ++i;
        // candidate threshold just above this distinct value
        double far = static_cast<double>(s.size() - i) /
                     static_cast<double>(s.size());
        if (far <= target_far) return {v + 1, far};
    }
    return {s.back() + 1, 0.0};  // target_far < 0: minimal achievable FAR
}

KsResult ks_less(const EmpiricalDist& a, const EmpiricalDist& b) {
    if (a.scores.empty() || b.scores.empty())
        throw std::runtime_error("empty score distribution");
    const auto& A = a.scores;
    const auto& B = b.scores;
    const size_t n = A.size(), m = B.size();
    size_t i = 0, j = 0;
    double d = 0.0;
    while (i < n || j < m) {
        int64_t x;
        if (i < n && j < m) x = std::min(A[i], B[j]);
        else if (i < n) x = A[i];
        else x = B[j];
        while (i < n && A[i] == x) ++i;
        while (j < m && B[j] == x) ++j;
        double diff = static_cast<double>(i) / static_cast<double>(n) -
                      static_cast<double>(j) / static_cast<double>(m);
        d = std::max(d, diff);
    }
    double nm = static_cast<double>(n) * static_cast<double>(m);
    double p = std::exp(-2.0 * nm * d * d / static_cast<double>(n + m));
    p = std::clamp(p, 0.0, 1.0);
    return {d, p, n, m};
}

MetricSummary summarize(const std::vector<double>& values) {
    const size_t n = values.size();
    if (n == 0) throw std::runtime_error("summarize: empty input");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    if (n == 1) return {mean, 0.0, {}, {}, 1};

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        double d = v - mean;
        double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    double stddev = std::sqrt(m2 / static_cast<double>(n - 1));
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);

    MetricSummary out{mean, stddev, {}, {}, n};
    if (m2 > 0.0) {
        out.skewness = m3 / std::pow(m2, 1.5);
        out.ex_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return out;
}

FeatureStats feature_stats(const Eigen::MatrixXd& rows) {
    if (rows.rows() < 2) throw ValidationError("need >= 2 samples");
    const auto r = rows.rows();
    Eigen::VectorXd mu = rows.colwise().mean();
    Eigen::MatrixXd centered = rows.rowwise() - mu.transpose();
    Eigen::MatrixXd cov =
        (centered.transpose() * centered) / static_cast<double>(r - 1);
    return {std::move(mu), std::move(cov)};
}

namespace {

// Symmetric PSD square root; rejects eigenvalues below -1e-8.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a) {
    Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed");
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] < -1e-8)
            throw std::runtime_error("covariance is not positive semi-definite");
        ev[i] = std::max(ev[i], 0.0);
    }
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
           es.eigenvectors().transpose();
}

}  // namespace

double frechet_distance(const Eigen::VectorXd& mu_a, const Eigen::MatrixXd& cov_a,
                        const Eigen::VectorXd& mu_b, const Eigen::MatrixXd& cov_b) {
    const auto d = mu_a.size();
    if (mu_b.size() != d || cov_a.rows() != d || cov_a.cols() != d ||
        cov_b.rows() != d || cov_b.cols() != d)
        throw ValidationError("dimension mismatch");

    Eigen::MatrixXd s = psd_sqrt(cov_a);
    Eigen::MatrixXd inner = s * cov_b * s;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 *
                                                      (inner + inner.transpose()));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed");
    double tr_sqrt = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        tr_sqrt += std::sqrt(std::max(es.eigenvalues()[i], 0.0));

    // also validates cov_b's spectrum
    psd_sqrt(cov_b);

    double d2 = (mu_a - mu_b).squaredNorm() + cov_a.trace() + cov_b.trace() -
                2.0 * tr_sqrt;
    return std::sqrt(std::max(d2, 0.0));
}

Eigen::MatrixXd read_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open features file: " + path);

    auto parse_row = [](const std::string& line, std::vector<double>& out) {
        out.clear();
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) {
            size_t b = field.find_first_not_of(" \t");
            if (b == std::string::npos) return false;
            size_t e = field.find_last_not_of(" \t");
            try {
                size_t used = 0;
                double v = std::stod(field.substr(b, e - b + 1), &used);
                if (used != e - b + 1) return false;
                out.push_back(v);
            } catch (const std::exception&) {
                return false;
            }
        }
        return !out.empty();
    };

    std::vector<std::vector<double>> rows;
    std::string line;
    size_t lineno = 0;
    bool first_data = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        if (!parse_row(line, row)) {
            if (first_data) continue;  // header line
            throw ValidationError("features line " + std::to_string(lineno) +
                                  ": non-numeric field");
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ValidationError("features line " + std::to_string(lineno) +
                                  ": inconsistent column count");
        first_data = false;
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError("no feature rows in " + path);

    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(rows.front().size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j];
    return out;
}

std::vector<HistBin> histogram(const EmpiricalDist& d, int64_t bin_width) {
    if (bin_width < 1) throw ValidationError("bin width must be >= 1");
    if (d.scores.empty()) return {};
    auto bin_of = [&](int64_t v) {
        int64_t q = v / bin_width;
        if (v % bin_width != 0 && v < 0) --q;  // floor division
        return q;
    };
    int64_t lo = bin_of(d.scores.front()), hi = bin_of(d.scores.back());
    std::vector<HistBin> bins;
    bins.reserve(static_cast<size_t>(hi - lo + 1));
    for (int64_t b = lo; b <= hi; ++b) bins.push_back({b * bin_width, 0});
    for (int64_t v : d.scores)
        ++bins[static_cast<size_t>(bin_of(v) - lo)].count;
    return bins;
}

std::vector<CdfPoint> cdf_points(const EmpiricalDist& d) {
    std::vector<CdfPoint> pts;
    const auto& s = d.scores;
    for (size_t i = 0; i < s.size();) {
        int64_t v = s[i];
        while (i < s.size() && s[i] == v) ++i;
        pts.push_back({v, static_cast<double>(i) / static_cast<double>(s.size())});
    }
    return pts;
}

}  // namespace fpkit
