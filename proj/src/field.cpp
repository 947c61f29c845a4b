#include "evfield/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "evfield/errors.hpp"

namespace evfield {

namespace {

constexpr double kTwoPi = 6.283185307179586;

void check_field_spec(int n, const FieldSpec& f) {
    if (f.center < 0 || f.center >= n)
        throw std::out_of_range("field center " + std::to_string(f.center) +
                                " out of range for n=" + std::to_string(n));
    if (f.field_size < 1) throw std::invalid_argument("field_size must be >= 1");
    if (f.sigma <= 0.0) throw std::invalid_argument("sigma must be > 0");
}

// Writes the same length-n row vector into every biased row.
template <typename RowValue>
BiasMatrix fill_bias(int n, int central_row, BiasScope scope, RecoupleStrategy variant,
                     RowValue value_at) {
    BiasMatrix g = BiasMatrix::zeros(n, variant);
    std::vector<double> row(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) row[static_cast<size_t>(j)] = value_at(j);
    if (scope == BiasScope::CentralRow) {
        for (int j = 0; j < n; ++j) g.at(central_row, j) = row[static_cast<size_t>(j)];
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g.at(i, j) = row[static_cast<size_t>(j)];
    }
    return g;
}

}  // namespace

int field_size(const ParsedSentence& s, int center) {
    int d = 0;
    for (int q : dependency_neighbors(s, center)) d = std::max(d, std::abs(q - center));
    return d == 0 ? 1 : d;
}

FieldSpec make_field_spec(const ParsedSentence& s, int center) {
    FieldSpec f;
    f.center = center;
    f.field_size = field_size(s, center);
    f.sigma = f.field_size / 2.0;
    return f;
}

const char* to_string(RecoupleStrategy strategy) {
    switch (strategy) {
        case RecoupleStrategy::None: return "none";
        case RecoupleStrategy::Gau: return "gau";
        case RecoupleStrategy::Mul: return "mul";
        case RecoupleStrategy::Gmm: return "gmm";
        case RecoupleStrategy::Fusion: return "fusion";
    }
    return "?";
}

const char* to_string(BiasScope scope) {
    return scope == BiasScope::CentralRow ? "central_row" : "all_rows";
}

RecoupleStrategy strategy_from_string(std::string_view s) {
    if (s == "none") return RecoupleStrategy::None;
    if (s == "gau") return RecoupleStrategy::Gau;
    if (s == "mul") return RecoupleStrategy::Mul;
    if (s == "gmm") return RecoupleStrategy::Gmm;
    if (s == "fusion") return RecoupleStrategy::Fusion;
    throw ConfigError("unknown strategy '" + std::string(s) + "'");
}

BiasScope scope_from_string(std::string_view s) {
    if (s == "central_row") return BiasScope::CentralRow;
    if (s == "all_rows") return BiasScope::AllRows;
    throw ConfigError("unknown bias scope '" + std::string(s) + "'");
}

BiasMatrix BiasMatrix::zeros(int n, RecoupleStrategy variant) {
    BiasMatrix g;
    g.n = n;
    g.variant = variant;
    g.values.assign(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0);
    return g;
}

BiasMatrix gau_bias(int n, const FieldSpec& f, BiasScope scope) {
    check_field_spec(n, f);
    const double inv = 1.0 / (2.0 * f.sigma * f.sigma);
    return fill_bias(n, f.center, scope, RecoupleStrategy::Gau, [&](int j) {
        const double d = static_cast<double>(j - f.center);
        return -d * d * inv;
    });
}

std::pair<double, double> mul_recouple(const std::vector<FieldSpec>& group) {
    if (group.empty()) throw std::invalid_argument("mul_recouple: empty group");
    double precision = 0.0;
    double weighted_mean = 0.0;
    for (const FieldSpec& f : group) {
        if (f.sigma <= 0.0) throw std::invalid_argument("mul_recouple: sigma must be > 0");
        const double p = 1.0 / (f.sigma * f.sigma);
        precision += p;
        weighted_mean += f.center * p;
    }
    const double var = 1.0 / precision;
    return {var * weighted_mean, std::sqrt(var)};
}

namespace {

void check_membership(const FieldSpec& f, const std::vector<FieldSpec>& group,
                      const char* op) {
    for (const FieldSpec& g : group)
        if (g.center == f.center && g.sigma == f.sigma) return;
    throw std::invalid_argument(std::string(op) + ": field spec is not a member of the group");
}

}  // namespace

BiasMatrix mul_bias(int n, const FieldSpec& f, const std::vector<FieldSpec>& group,
                    BiasScope scope) {
    check_field_spec(n, f);
    check_membership(f, group, "mul_bias");
    const auto [mu, sigma] = mul_recouple(group);
    const double inv_own = 1.0 / (2.0 * f.sigma * f.sigma);
    const double inv_mul = 1.0 / (2.0 * sigma * sigma);
    return fill_bias(n, f.center, scope, RecoupleStrategy::Mul, [&](int j) {
        const double down = static_cast<double>(j - f.center);
        const double dmul = static_cast<double>(j) - mu;
        return -down * down * inv_own - dmul * dmul * inv_mul;
    });
}

BiasMatrix gmm_bias(int n, const FieldSpec& f, const std::vector<FieldSpec>& group,
                    const RecoupleConfig& cfg, BiasScope scope) {
    check_field_spec(n, f);
    check_membership(f, group, "gmm_bias");

    struct Component {
        double log_weight;
        double mu;
        double inv_two_var;
        double log_norm;  // -log sqrt(2 pi sigma^2)
    };
    std::vector<Component> comps;
    const int others = std::max(static_cast<int>(group.size()) - 1, 1);
    const double beta_k = cfg.beta / others;
    auto push = [&](double w, const FieldSpec& g) {
        if (w < 0.0) throw std::invalid_argument("gmm_bias: negative mixture weight");
        if (w == 0.0) return;
        comps.push_back({std::log(w), static_cast<double>(g.center),
                         1.0 / (2.0 * g.sigma * g.sigma),
                         -0.5 * std::log(kTwoPi * g.sigma * g.sigma)});
    };
    push(cfg.alpha, f);
    for (const FieldSpec& g : group) {
        if (g.center == f.center) continue;
        push(beta_k, g);
    }
    if (comps.empty()) throw std::invalid_argument("gmm_bias: all mixture weights are zero");

    return fill_bias(n, f.center, scope, RecoupleStrategy::Gmm, [&](int j) {
        double m = -std::numeric_limits<double>::infinity();
        for (const Component& c : comps) {
            const double d = j - c.mu;
            const double t = c.log_weight + c.log_norm - d * d * c.inv_two_var;
            m = std::max(m, t);
        }
        double acc = 0.0;
        for (const Component& c : comps) {
            const double d = j - c.mu;
            acc += std::exp(c.log_weight + c.log_norm - d * d * c.inv_two_var - m);
        }
        return m + std::log(acc);
    });
}

BiasMatrix fusion_bias(int n, const FieldSpec& f, const std::vector<FieldSpec>& group,
                       const RecoupleConfig& cfg, BiasScope scope) {
    BiasMatrix mul = mul_bias(n, f, group, scope);
    const BiasMatrix gmm = gmm_bias(n, f, group, cfg, scope);
    for (size_t i = 0; i < mul.values.size(); ++i)
        mul.values[i] = 0.5 * (mul.values[i] + gmm.values[i]);
    mul.variant = RecoupleStrategy::Fusion;
    return mul;
}

BiasMatrix build_bias(const ParsedSentence& s, const CandidateSpan& candidate,
                      const RecoupleConfig& cfg) {
    const int n = s.size();
    if (candidate.position < 0 || candidate.position >= n)
        throw std::out_of_range("candidate position " + std::to_string(candidate.position) +
                                " out of range");
    if (cfg.strategy == RecoupleStrategy::None)
        return BiasMatrix::zeros(n, RecoupleStrategy::None);

    const FieldSpec f = make_field_spec(s, candidate.position);
    if (cfg.strategy == RecoupleStrategy::Gau) return gau_bias(n, f, cfg.scope);

    // Recoupling strategies act on the candidate's occurrence group.
    std::vector<FieldSpec> group;
    for (const OccurrenceGroup& g : group_occurrences(s)) {
        bool mine = false;
        for (size_t m = 0; m < g.positions.size(); ++m) {
            const CandidateSpan& c = s.candidates[static_cast<size_t>(g.candidate_indices[m])];
            if (c.position == candidate.position && c.kind == candidate.kind) mine = true;
        }
        if (!mine) continue;
        for (int p : g.positions) group.push_back(make_field_spec(s, p));
        break;
    }
    if (group.empty())
        throw std::invalid_argument("candidate at position " + std::to_string(candidate.position) +
                                    " is not part of the sentence");

    switch (cfg.strategy) {
        case RecoupleStrategy::Mul: return mul_bias(n, f, group, cfg.scope);
        case RecoupleStrategy::Gmm: return gmm_bias(n, f, group, cfg, cfg.scope);
        case RecoupleStrategy::Fusion: return fusion_bias(n, f, group, cfg, cfg.scope);
        default: break;
    }
    throw std::logic_error("unhandled strategy");
}

}  // namespace evfield
