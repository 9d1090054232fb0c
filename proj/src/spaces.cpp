#include "compgen/spaces.hpp"

#include <Eigen/SVD>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "compgen/io.hpp"

namespace compgen {

const char* space_kind_name(SpaceKind k) {
    switch (k) {
        case SpaceKind::domain: return "domain";
        case SpaceKind::function: return "function";
        case SpaceKind::mono: return "mono";
    }
    return "?";
}

SpaceKind parse_space_kind(const std::string& s) {
    if (s == "domain") return SpaceKind::domain;
    if (s == "function") return SpaceKind::function;
    if (s == "mono") return SpaceKind::mono;
    throw std::invalid_argument("unknown space kind: " + s);
}

std::optional<std::size_t> FactorizedSpace::row_of(const Term& t) const {
    auto it = row_ids.find(t.row_key());
    if (it == row_ids.end()) return std::nullopt;
    return it->second;
}

namespace {

Eigen::SparseMatrix<double> to_eigen(const SparseCooccurrence& m) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(m.nnz());
    for (std::size_t r = 0; r < m.n_rows(); ++r)
        for (std::size_t i = m.row_ptr[r]; i < m.row_ptr[r + 1]; ++i)
            trips.emplace_back(static_cast<int>(r), static_cast<int>(m.cols[i]), m.vals[i]);
    Eigen::SparseMatrix<double> a(static_cast<int>(m.n_rows()), static_cast<int>(m.n_cols()));
    a.setFromTriplets(trips.begin(), trips.end());
    return a;
}

Eigen::VectorXd seeded_unit_vector(std::mt19937_64& rng, Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        // 53-bit mantissa draw in [0,1), shifted to (-1,1); avoids the
        // implementation-defined std::uniform_real_distribution.
        double x = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
        v[i] = 2.0 * x - 1.0;
    }
    double norm = v.norm();
    if (norm == 0.0) v[0] = 1.0, norm = 1.0;
    return v / norm;
}

// Remove components along the first j columns of basis, twice for stability.
void reorthogonalize(Eigen::VectorXd& w, const Eigen::MatrixXd& basis, Eigen::Index j) {
    if (j == 0) return;
    auto b = basis.leftCols(j);
    for (int pass = 0; pass < 2; ++pass) w.noalias() -= b * (b.transpose() * w);
}

}  // namespace

FactorizedSpace truncated_svd(const SparseCooccurrence& m, std::size_t k_max, double tol,
                              std::uint64_t seed, SpaceKind kind) {
    if (k_max == 0) throw std::invalid_argument("truncated_svd: k_max must be positive");
    FactorizedSpace out;
    out.kind = kind;
    out.row_names = m.row_names;
    for (std::size_t i = 0; i < m.row_names.size(); ++i) out.row_ids[m.row_names[i]] = i;

    const Eigen::Index n = static_cast<Eigen::Index>(m.n_rows());
    const Eigen::Index d = static_cast<Eigen::Index>(m.n_cols());
    const Eigen::Index full = std::min(n, d);
    if (full == 0 || m.nnz() == 0) {
        out.u.resize(n, 0);
        out.sigma.resize(0);
        return out;
    }

    Eigen::SparseMatrix<double> a = to_eigen(m);
    const Eigen::Index want = std::min<Eigen::Index>(static_cast<Eigen::Index>(k_max), full);

    std::mt19937_64 rng(seed);
    Eigen::MatrixXd ubase(n, full), vbase(d, full);
    std::vector<double> alpha, beta;  // B diag and superdiag
    alpha.reserve(static_cast<std::size_t>(full));
    beta.reserve(static_cast<std::size_t>(full));

    Eigen::VectorXd v = seeded_unit_vector(rng, d);
    Eigen::VectorXd u_prev = Eigen::VectorXd::Zero(n);
    double beta_prev = 0.0;
    Eigen::Index j = 0;
    double sigma1_est = 0.0;
    // Breakdown threshold scales with the matrix: below it a new random
    // direction is injected with an exact zero coefficient in B.
    const double eps_break = 1e-13;

    Eigen::JacobiSVD<Eigen::MatrixXd> small_svd;
    auto bidiagonal = [&](Eigen::Index steps) {
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(steps, steps);
        for (Eigen::Index i = 0; i < steps; ++i) {
            b(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < steps) b(i, i + 1) = beta[static_cast<std::size_t>(i)];
        }
        return b;
    };

    while (j < full) {
        vbase.col(j) = v;
        Eigen::VectorXd w = a * v - beta_prev * u_prev;
        reorthogonalize(w, ubase, j);
        double al = w.norm();
        if (al > eps_break * std::max(1.0, sigma1_est)) {
            w /= al;
        } else {
            al = 0.0;
            w = seeded_unit_vector(rng, n);
            reorthogonalize(w, ubase, j);
            double nw = w.norm();
            if (nw == 0.0) break;
            w /= nw;
        }
        ubase.col(j) = w;
        alpha.push_back(al);
        sigma1_est = std::max(sigma1_est, al);

        Eigen::VectorXd z = a.transpose() * w - al * v;
        reorthogonalize(z, vbase, j + 1);
        double be = z.norm();
        if (be > eps_break * std::max(1.0, sigma1_est)) {
            z /= be;
        } else {
            be = 0.0;
            if (j + 1 < full) {
                z = seeded_unit_vector(rng, d);
                reorthogonalize(z, vbase, j + 1);
                double nz = z.norm();
                if (nz > 0.0) z /= nz;
            }
        }
        beta.push_back(be);
        ++j;
        v = z;
        u_prev = ubase.col(j - 1);
        beta_prev = be;

        // Convergence check on a block boundary or at exhaustion: the i-th
        // Ritz residual is beta_j * |last row of left singular vector|.
        bool boundary = (j % 16 == 0) || j == full;
        if (!boundary || j < want) continue;
        Eigen::MatrixXd b = bidiagonal(j);
        small_svd.compute(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = small_svd.singularValues();
        double s1 = sv.size() > 0 ? sv[0] : 0.0;
        if (j == full) break;
        bool done = true;
        double tail = beta[static_cast<std::size_t>(j - 1)];
        for (Eigen::Index i = 0; i < want && i < sv.size(); ++i) {
            double resid = tail * std::abs(small_svd.matrixU()(j - 1, i));
            if (resid > tol * std::max(s1, 1e-300)) {
                done = false;
                break;
            }
        }
        if (done) break;
    }

    // When the row side exhausts first (wide matrix), the coupling to the
    // next right vector is still real: sigma(A) = sigma(U^T A [V_j | v_j]),
    // so fold the final beta in as an extra column. On tall or square input
    // that beta vanishes once the right basis is complete.
    Eigen::MatrixXd b;
    double tail_beta = j > 0 ? beta[static_cast<std::size_t>(j - 1)] : 0.0;
    if (j == full && n < d && tail_beta > 0.0) {
        b = Eigen::MatrixXd::Zero(j, j + 1);
        for (Eigen::Index i = 0; i < j; ++i) {
            b(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < j) b(i, i + 1) = beta[static_cast<std::size_t>(i)];
        }
        b(j - 1, j) = tail_beta;
    } else {
        b = bidiagonal(j);
    }
    small_svd.compute(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = small_svd.singularValues();
    double s1 = sv.size() > 0 ? sv[0] : 0.0;
    // Keep factors with genuinely positive singular values.
    double drop = s1 * 1e-10 * static_cast<double>(std::max(n, d));
    Eigen::Index kept = 0;
    for (Eigen::Index i = 0; i < std::min(want, sv.size()); ++i)
        if (sv[i] > drop && sv[i] > 0.0) ++kept;
    out.u.resize(n, kept);
    out.sigma.resize(kept);
    if (kept > 0) {
        out.u.noalias() = ubase.leftCols(j) * small_svd.matrixU().leftCols(kept);
        out.sigma = sv.head(kept);
    }
    return out;
}

ViewScorer::ViewScorer(const FactorizedSpace& s, SpaceView v, std::size_t target_row) : s_(s) {
    k_ = std::min(v.k, s.n_factors());
    sigpow_.resize(k_);
    for (std::size_t i = 0; i < k_; ++i)
        sigpow_[i] = std::pow(s.sigma[static_cast<Eigen::Index>(i)], v.p);
    target_.resize(k_);
    const auto r = static_cast<Eigen::Index>(target_row);
    for (std::size_t i = 0; i < k_; ++i) {
        double x = s.u(r, static_cast<Eigen::Index>(i)) * sigpow_[i];
        target_[i] = x;
        target_norm2_ += x * x;
    }
}

double ViewScorer::score_row(std::size_t row) const {
    const auto r = static_cast<Eigen::Index>(row);
    double dot = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < k_; ++i) {
        double y = s_.u(r, static_cast<Eigen::Index>(i)) * sigpow_[i];
        dot += target_[i] * y;
        norm2 += y * y;
    }
    if (target_norm2_ == 0.0 || norm2 == 0.0) return 0.0;
    return dot / (std::sqrt(target_norm2_) * std::sqrt(norm2));
}

double similarity(const FactorizedSpace& s, SpaceView v, const Term& a, const Term& b) {
    auto ra = s.row_of(a);
    auto rb = s.row_of(b);
    if (!ra || !rb) return 0.0;
    ViewScorer scorer(s, v, *ra);
    return scorer.score_row(*rb);
}

std::vector<double> view_vector(const FactorizedSpace& s, SpaceView v, const Term& t) {
    auto r = s.row_of(t);
    if (!r) return {};
    std::size_t k = std::min(v.k, s.n_factors());
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i)
        out[i] = s.u(static_cast<Eigen::Index>(*r), static_cast<Eigen::Index>(i)) *
                 std::pow(s.sigma[static_cast<Eigen::Index>(i)], v.p);
    return out;
}

FactorizedSpace build_mono(const SparseCooccurrence& domain_ppmi,
                           const SparseCooccurrence& function_ppmi, std::size_t k_max, double tol,
                           std::uint64_t seed) {
    if (domain_ppmi.row_names != function_ppmi.row_names)
        throw std::invalid_argument("build_mono: row vocabularies differ");
    SparseCooccurrence merged;
    merged.mode = domain_ppmi.mode;
    merged.weighting = domain_ppmi.weighting;
    merged.row_names = domain_ppmi.row_names;
    merged.row_ids = domain_ppmi.row_ids;
    merged.col_names.reserve(domain_ppmi.n_cols() + function_ppmi.n_cols());
    for (const auto& c : domain_ppmi.col_names) merged.col_names.push_back("d:" + c);
    for (const auto& c : function_ppmi.col_names) merged.col_names.push_back("f:" + c);
    for (std::size_t i = 0; i < merged.col_names.size(); ++i)
        merged.col_ids[merged.col_names[i]] = i;
    merged.row_ptr.assign(merged.n_rows() + 1, 0);
    std::size_t shift = domain_ppmi.n_cols();
    for (std::size_t r = 0; r < merged.n_rows(); ++r) {
        for (std::size_t i = domain_ppmi.row_ptr[r]; i < domain_ppmi.row_ptr[r + 1]; ++i) {
            merged.cols.push_back(domain_ppmi.cols[i]);
            merged.vals.push_back(domain_ppmi.vals[i]);
        }
        for (std::size_t i = function_ppmi.row_ptr[r]; i < function_ppmi.row_ptr[r + 1]; ++i) {
            merged.cols.push_back(function_ppmi.cols[i] + shift);
            merged.vals.push_back(function_ppmi.vals[i]);
        }
        merged.row_ptr[r + 1] = merged.cols.size();
    }
    return truncated_svd(merged, k_max, tol, seed, SpaceKind::mono);
}

void FactorizedSpace::save(const std::filesystem::path& path, const std::string& config_hash,
                           std::uint64_t seed) const {
    std::ostringstream os;
    os << io::header_line({"space", 1, config_hash, seed}) << "\n";
    os << "kind\t" << space_kind_name(kind) << "\n";
    os << "rows\t" << n_rows() << "\nk\t" << n_factors() << "\n";
    for (const auto& r : row_names) os << "R\t" << r << "\n";
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        os << "S\t" << io::fmt_full(sigma[i]) << "\n";
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
        os << "U";
        for (Eigen::Index i = 0; i < u.cols(); ++i) os << "\t" << io::fmt_full(u(r, i));
        os << "\n";
    }
    io::atomic_write(path, os.str());
}

FactorizedSpace FactorizedSpace::load(const std::filesystem::path& path) {
    auto is = io::open_input(path, "space file");
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty space file: " + path.string());
    io::parse_header_line(line, "space");
    FactorizedSpace s;
    auto expect_kv = [&](const char* key) {
        if (!std::getline(is, line)) throw std::runtime_error("truncated space file");
        auto parts = io::split(line, '\t');
        if (parts.size() != 2 || parts[0] != key)
            throw std::runtime_error(std::string("expected ") + key + " line, got: " + line);
        return parts[1];
    };
    s.kind = parse_space_kind(expect_kv("kind"));
    std::size_t n = std::stoull(expect_kv("rows"));
    std::size_t k = std::stoull(expect_kv("k"));
    s.row_names.reserve(n);
    s.u.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    s.sigma.resize(static_cast<Eigen::Index>(k));
    std::size_t si = 0, ui = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto parts = io::split(line, '\t');
        if (parts[0] == "R" && parts.size() == 2) {
            s.row_names.push_back(parts[1]);
        } else if (parts[0] == "S" && parts.size() == 2) {
            if (si >= k) throw std::runtime_error("too many S lines in " + path.string());
            s.sigma[static_cast<Eigen::Index>(si++)] = io::parse_double(parts[1]);
        } else if (parts[0] == "U") {
            if (parts.size() != k + 1 || ui >= n)
                throw std::runtime_error("bad U line in " + path.string());
            for (std::size_t i = 0; i < k; ++i)
                s.u(static_cast<Eigen::Index>(ui), static_cast<Eigen::Index>(i)) =
                    io::parse_double(parts[i + 1]);
            ++ui;
        } else {
            throw std::runtime_error("bad space line: " + line);
        }
    }
    if (s.row_names.size() != n || si != k || ui != n)
        throw std::runtime_error("space file counts do not match contents: " + path.string());
    for (std::size_t i = 0; i < n; ++i) s.row_ids[s.row_names[i]] = i;
    return s;
}

}  // namespace compgen
