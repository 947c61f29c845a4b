#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "evfield/corpus.hpp"

namespace evfield {

// A candidate's syntactic field: center position, field size D (the largest
// linear offset of a 1-hop dependency neighbor, at least 1), and the
// Gaussian deviation sigma = D / 2.
struct FieldSpec {
    int center = 0;
    int field_size = 1;
    double sigma = 0.5;
};

// D for the token at `center`: max |P_j - P_center| over 1-hop dependency
// neighbors, 1 if there are none.
int field_size(const ParsedSentence& s, int center);

FieldSpec make_field_spec(const ParsedSentence& s, int center);

enum class RecoupleStrategy { None, Gau, Mul, Gmm, Fusion };
enum class BiasScope { CentralRow, AllRows };

const char* to_string(RecoupleStrategy strategy);
const char* to_string(BiasScope scope);
RecoupleStrategy strategy_from_string(std::string_view s);
BiasScope scope_from_string(std::string_view s);

struct RecoupleConfig {
    RecoupleStrategy strategy = RecoupleStrategy::None;
    double alpha = 0.5;  // weight of the candidate's own field component
    double beta = 0.5;   // total weight of the other occurrences' components
    BiasScope scope = BiasScope::CentralRow;
};

// Additive attention-score bias, row-major n x n. Rows not selected by the
// bias scope are exactly zero.
struct BiasMatrix {
    int n = 0;
    RecoupleStrategy variant = RecoupleStrategy::None;
    std::vector<double> values;

    static BiasMatrix zeros(int n, RecoupleStrategy variant);
    double at(int i, int j) const { return values[static_cast<size_t>(i) * n + j]; }
    double& at(int i, int j) { return values[static_cast<size_t>(i) * n + j]; }
};

// Single-field Gaussian bias: biased rows carry -(P_j - P_i)^2 / (2 sigma_i^2).
BiasMatrix gau_bias(int n, const FieldSpec& f, BiasScope scope);

// Gaussian-product recoupling of a group of fields:
// 1/sigma_mul^2 = sum_k 1/sigma_k^2, mu_mul = sigma_mul^2 * sum_k mu_k/sigma_k^2.
// Returns (mu_mul, sigma_mul).
std::pair<double, double> mul_recouple(const std::vector<FieldSpec>& group);

// Product-form bias: the candidate's own Gaussian term plus the recoupled
// group Gaussian term, both quadratic and <= 0.
BiasMatrix mul_bias(int n, const FieldSpec& f, const std::vector<FieldSpec>& group,
                    BiasScope scope);

// Mixture-form bias: log of alpha * N(P_j; P_i, sigma_i^2) plus
// beta_k * N(P_j; P_k, sigma_k^2) summed over the other occurrences,
// beta_k = beta / max(N - 1, 1). Evaluated in log space with max
// subtraction, so entries stay finite for any separation.
BiasMatrix gmm_bias(int n, const FieldSpec& f, const std::vector<FieldSpec>& group,
                    const RecoupleConfig& cfg, BiasScope scope);

// Elementwise mean of the product-form and mixture-form biases.
BiasMatrix fusion_bias(int n, const FieldSpec& f, const std::vector<FieldSpec>& group,
                       const RecoupleConfig& cfg, BiasScope scope);

// Strategy dispatch for one candidate of a sentence. MUL/GMM/FUSION use the
// candidate's occurrence group; a singleton group degrades to the
// single-component closed forms.
BiasMatrix build_bias(const ParsedSentence& s, const CandidateSpan& candidate,
                      const RecoupleConfig& cfg);

}  // namespace evfield
