#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "compgen/cooccur.hpp"
#include "compgen/term.hpp"

namespace compgen {

enum class SpaceKind : std::uint8_t { domain, function, mono };

const char* space_kind_name(SpaceKind k);
SpaceKind parse_space_kind(const std::string& s);

// Truncated SVD of a co-occurrence matrix. Only the row factors are kept:
// a term's vector in the view (k, p) is row i of U(:, 0:k) * diag(sigma^p).
// One factorization at k_max serves every smaller k.
struct FactorizedSpace {
    SpaceKind kind = SpaceKind::domain;
    std::vector<std::string> row_names;
    std::unordered_map<std::string, std::size_t> row_ids;
    Eigen::MatrixXd u;       // n x k
    Eigen::VectorXd sigma;   // k, descending, strictly positive

    std::size_t n_rows() const { return row_names.size(); }
    std::size_t n_factors() const { return static_cast<std::size_t>(sigma.size()); }
    std::optional<std::size_t> row_of(const Term& t) const;

    void save(const std::filesystem::path& path, const std::string& config_hash = "0",
              std::uint64_t seed = 0) const;
    static FactorizedSpace load(const std::filesystem::path& path);
};

struct SpaceView {
    std::size_t k = 0;
    double p = 1.0;
};

// Golub-Kahan-Lanczos bidiagonalization with full reorthogonalization and
// seeded random (re)starts. Deterministic for a fixed seed. Singular values
// match a dense reference within tol * sigma_1; zero singular values are
// dropped, so the factor count can come out below k_max.
FactorizedSpace truncated_svd(const SparseCooccurrence& m, std::size_t k_max, double tol = 1e-10,
                              std::uint64_t seed = 42, SpaceKind kind = SpaceKind::domain);

// Evaluates cosines of one fixed target row against arbitrary rows under a
// view. similarity() and the bulk generators share this, so their arithmetic
// is identical operation for operation.
class ViewScorer {
  public:
    ViewScorer(const FactorizedSpace& s, SpaceView v, std::size_t target_row);
    double score_row(std::size_t row) const;
    std::size_t k() const { return k_; }
    const std::vector<double>& sigpow() const { return sigpow_; }

  private:
    const FactorizedSpace& s_;
    std::size_t k_;
    std::vector<double> sigpow_;
    std::vector<double> target_;
    double target_norm2_ = 0.0;
};

// Cosine of the two terms' view vectors; 0 when either row is missing or
// zero. The view's k is clamped to the available factor count, so the fixed
// feature grid works on small spaces.
double similarity(const FactorizedSpace& s, SpaceView v, const Term& a, const Term& b);

// A term's raw view vector (empty when the row is missing).
std::vector<double> view_vector(const FactorizedSpace& s, SpaceView v, const Term& t);

// Merge of two co-occurrence matrices over one row vocabulary: columns are
// concatenated (namespaced "d:" / "f:"), then factorized.
FactorizedSpace build_mono(const SparseCooccurrence& domain_ppmi,
                           const SparseCooccurrence& function_ppmi, std::size_t k_max,
                           double tol = 1e-10, std::uint64_t seed = 42);

}  // namespace compgen
