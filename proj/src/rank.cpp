#include "compgen/rank.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "compgen/io.hpp"
#include "compgen/rng.hpp"

namespace compgen {

std::size_t TrainingSet::count_label(int label) const {
    std::size_t n = 0;
    for (const auto& r : rows)
        if (r.label == label) ++n;
    return n;
}

Triple triple_for(const Term& target, const Term& candidate) {
    if (candidate.is_bigram()) {
        // Decomposition: the candidate supplies modifier and head.
        return {target, Term::make_unigram(candidate.modifier),
                Term::make_unigram(candidate.head)};
    }
    if (!target.is_pair())
        throw std::invalid_argument("triple_for: unigram target needs a bigram candidate");
    return {Term::make_unigram(target.modifier), Term::make_unigram(target.head), candidate};
}

TrainingSet assemble_training(const Dataset& dataset, const std::map<Term, RankedList>& pools,
                              std::size_t ratio_01, std::uint64_t seed,
                              const FeaturizeFn& featurizer) {
    TrainingSet ts;
    ts.task = dataset.task;
    ts.flavor = dataset.flavor;
    std::mt19937_64 rng(seed);

    for (const auto* e : dataset.split_entries(Split::train)) {
        auto pit = pools.find(e->target);
        if (pit == pools.end())
            throw std::runtime_error("assemble_training: no pool for training target " +
                                     e->target.surface);
        const auto& items = pit->second.items;
        std::set<Term> solutions(e->solutions.begin(), e->solutions.end());

        std::vector<std::size_t> pos_idx, neg_idx;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (solutions.count(items[i].candidate))
                pos_idx.push_back(i);
            else
                neg_idx.push_back(i);
        }
        if (pos_idx.empty()) continue;  // target contributes nothing

        std::size_t want_neg = ratio_01 * pos_idx.size();
        std::vector<std::size_t> chosen_neg;
        if (neg_idx.size() <= want_neg) {
            chosen_neg = neg_idx;
            if (neg_idx.size() < want_neg)
                ts.warnings.push_back("pool for " + e->target.surface + " has only " +
                                      std::to_string(neg_idx.size()) + " distractors of " +
                                      std::to_string(want_neg) + " wanted");
        } else {
            auto picks = sample_without_replacement(rng, neg_idx.size(), want_neg);
            std::sort(picks.begin(), picks.end());
            for (auto p : picks) chosen_neg.push_back(neg_idx[p]);
        }

        auto push_row = [&](std::size_t item_idx, int label) {
            TrainingRow row;
            row.target = e->target;
            row.candidate = items[item_idx].candidate;
            row.label = label;
            if (featurizer) row.features = featurizer(triple_for(e->target, row.candidate));
            ts.rows.push_back(std::move(row));
        };
        for (auto i : pos_idx) push_row(i, 1);
        for (auto i : chosen_neg) push_row(i, 0);
    }
    return ts;
}

FeatureVector augment_domains(const FeatureVector& fv, DomainTag tag) {
    FeatureVector out(3 * fv.size(), 0.0);
    std::copy(fv.begin(), fv.end(), out.begin());
    std::size_t offset = tag == DomainTag::standard ? fv.size() : 2 * fv.size();
    std::copy(fv.begin(), fv.end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
    return out;
}

TrainingSet augment_training(const TrainingSet& standard_set, const TrainingSet& holistic_set) {
    if (standard_set.task != holistic_set.task)
        throw std::invalid_argument("augment_training: task mismatch");
    TrainingSet ts;
    ts.task = standard_set.task;
    ts.flavor = Flavor::standard;  // mixed; flavor kept for bookkeeping only
    ts.augmented = true;
    auto add = [&](const TrainingSet& src, DomainTag tag) {
        for (const auto& r : src.rows) {
            TrainingRow row = r;
            row.features = augment_domains(r.features, tag);
            ts.rows.push_back(std::move(row));
        }
        ts.warnings.insert(ts.warnings.end(), src.warnings.begin(), src.warnings.end());
    };
    add(standard_set, DomainTag::standard);
    add(holistic_set, DomainTag::holistic);
    return ts;
}

namespace {

// Inhomogeneous polynomial kernel on scaled features.
double poly_kernel(const FeatureVector& x, const FeatureVector& y, int degree) {
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
    double base = dot + 1.0;
    double k = 1.0;
    for (int d = 0; d < degree; ++d) k *= base;
    return k;
}

// Two-variable SMO for C-SVC with second-order working-pair selection.
struct SmoResult {
    std::vector<double> alpha;
    double rho = 0.0;
};

SmoResult smo_solve(const std::vector<FeatureVector>& x, const std::vector<double>& y,
                    int degree, double cost, double eps) {
    const std::size_t n = x.size();
    std::vector<double> self_k(n);
    for (std::size_t i = 0; i < n; ++i) self_k[i] = poly_kernel(x[i], x[i], degree);
    auto knorm = [&](std::size_t i, std::size_t j) {
        return poly_kernel(x[i], x[j], degree) / std::sqrt(self_k[i] * self_k[j]);
    };

    // Cache normalized kernel rows; the training sets here are a few
    // thousand rows at most, so capping the cache keeps memory modest.
    const std::size_t cache_cap = std::max<std::size_t>(64, (1u << 27) / (n * 8 + 1));
    std::vector<std::vector<double>> cache(n);
    std::vector<std::size_t> cached_rows;
    auto row = [&](std::size_t i) -> const std::vector<double>& {
        if (cache[i].empty()) {
            if (cached_rows.size() >= cache_cap) {
                std::size_t evict = cached_rows.front();
                cached_rows.erase(cached_rows.begin());
                cache[evict].clear();
                cache[evict].shrink_to_fit();
            }
            cache[i].resize(n);
            for (std::size_t j = 0; j < n; ++j) cache[i][j] = knorm(i, j);
            cached_rows.push_back(i);
        }
        return cache[i];
    };

    std::vector<double> alpha(n, 0.0), grad(n, -1.0);
    const double tau = 1e-12;

    auto in_up = [&](std::size_t t) {
        return (y[t] > 0 && alpha[t] < cost) || (y[t] < 0 && alpha[t] > 0);
    };
    auto in_low = [&](std::size_t t) {
        return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < cost);
    };

    const std::size_t max_iter = std::max<std::size_t>(10000000, n * 1000);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        // i: most violating on the up side.
        double g_max = -1e300;
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (!in_up(t)) continue;
            double v = -y[t] * grad[t];
            if (v > g_max) {
                g_max = v;
                i = t;
            }
        }
        if (i == n) break;
        const auto& ki = row(i);
        // j: best second-order gain on the low side. The curvature along the
        // feasible direction is K_ii + K_jj - 2 K_ij for either label pair;
        // the normalized kernel has unit diagonal.
        double g_min = 1e300, best_obj = 1e300;
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (!in_low(t)) continue;
            double v = -y[t] * grad[t];
            g_min = std::min(g_min, v);
            double b = g_max - v;
            if (b <= 0) continue;
            double a = 2.0 - 2.0 * ki[t];
            if (a <= 0) a = tau;
            double obj = -(b * b) / a;
            if (obj < best_obj) {
                best_obj = obj;
                j = t;
            }
        }
        if (j == n || g_max - g_min <= eps) break;

        const auto& kj = row(j);
        double quad = 2.0 - 2.0 * ki[j];
        if (quad <= 0) quad = tau;
        double old_ai = alpha[i], old_aj = alpha[j];
        if (y[i] != y[j]) {
            double delta = (-grad[i] - grad[j]) / quad;
            double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = diff;
                }
                if (alpha[i] > cost) {
                    alpha[i] = cost;
                    alpha[j] = cost - diff;
                }
            } else {
                if (alpha[i] < 0) {
                    alpha[i] = 0;
                    alpha[j] = -diff;
                }
                if (alpha[j] > cost) {
                    alpha[j] = cost;
                    alpha[i] = cost + diff;
                }
            }
        } else {
            double delta = (grad[i] - grad[j]) / quad;
            double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > cost) {
                if (alpha[i] > cost) {
                    alpha[i] = cost;
                    alpha[j] = sum - cost;
                }
                if (alpha[j] > cost) {
                    alpha[j] = cost;
                    alpha[i] = sum - cost;
                }
            } else {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = sum;
                }
                if (alpha[i] < 0) {
                    alpha[i] = 0;
                    alpha[j] = sum;
                }
            }
        }

        double d_i = (alpha[i] - old_ai) * y[i];
        double d_j = (alpha[j] - old_aj) * y[j];
        for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (ki[t] * d_i + kj[t] * d_j);
    }

    // rho via the free support vectors, with the bound fallback.
    double rho_sum = 0.0, ub = 1e300, lb = -1e300;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        double yg = y[t] * grad[t];
        if (alpha[t] > 0 && alpha[t] < cost) {
            rho_sum += yg;
            ++n_free;
        } else if ((y[t] > 0 && alpha[t] >= cost) || (y[t] < 0 && alpha[t] <= 0)) {
            lb = std::max(lb, yg);
        } else {
            ub = std::min(ub, yg);
        }
    }
    SmoResult r;
    r.alpha = std::move(alpha);
    r.rho = n_free > 0 ? rho_sum / static_cast<double>(n_free) : (ub + lb) / 2.0;
    return r;
}

// Maximum-likelihood sigmoid fit on decision values (Newton iterations with
// backtracking and the usual smoothed target frequencies).
std::pair<double, double> platt_fit(const std::vector<double>& dec,
                                    const std::vector<double>& y) {
    const std::size_t n = dec.size();
    double prior1 = 0.0, prior0 = 0.0;
    for (double v : y) (v > 0 ? prior1 : prior0) += 1.0;
    const double hi = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo = 1.0 / (prior0 + 2.0);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = y[i] > 0 ? hi : lo;

    double a = 0.0, b = std::log((prior0 + 1.0) / (prior1 + 1.0));
    auto objective = [&](double pa, double pb) {
        double f = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = dec[i] * pa + pb;
            if (z >= 0)
                f += t[i] * z + std::log1p(std::exp(-z));
            else
                f += (t[i] - 1.0) * z + std::log1p(std::exp(z));
        }
        return f;
    };
    double fval = objective(a, b);
    const double min_step = 1e-10, sigma = 1e-12;
    for (int iter = 0; iter < 100; ++iter) {
        double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = dec[i] * a + b;
            double p, q;
            if (z >= 0) {
                p = std::exp(-z) / (1.0 + std::exp(-z));
                q = 1.0 / (1.0 + std::exp(-z));
            } else {
                p = 1.0 / (1.0 + std::exp(z));
                q = std::exp(z) / (1.0 + std::exp(z));
            }
            double d1 = t[i] - p, d2 = p * q;
            h11 += dec[i] * dec[i] * d2;
            h22 += d2;
            h21 += dec[i] * d2;
            g1 += dec[i] * d1;
            g2 += d1;
        }
        if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;
        double det = h11 * h22 - h21 * h21;
        double da = -(h22 * g1 - h21 * g2) / det;
        double db = -(-h21 * g1 + h11 * g2) / det;
        double gd = g1 * da + g2 * db;
        double step = 1.0;
        while (step >= min_step) {
            double na = a + step * da, nb = b + step * db;
            double nf = objective(na, nb);
            if (nf < fval + 1e-4 * step * gd) {
                a = na;
                b = nb;
                fval = nf;
                break;
            }
            step /= 2.0;
        }
        if (step < min_step) break;
    }
    return {a, b};
}

}  // namespace

FeatureVector RankerModel::scale(const FeatureVector& raw) const {
    if (raw.size() != dim)
        throw std::invalid_argument("feature dimension mismatch: got " +
                                    std::to_string(raw.size()) + ", model wants " +
                                    std::to_string(dim));
    FeatureVector out(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        double span = feat_max[i] - feat_min[i];
        out[i] = span > 0.0 ? (raw[i] - feat_min[i]) / span : 0.0;
    }
    return out;
}

double RankerModel::decision(const FeatureVector& raw) const {
    FeatureVector xs = scale(raw);
    double self = poly_kernel(xs, xs, degree);
    double f = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        double k = poly_kernel(support[i], xs, degree) /
                   std::sqrt(poly_kernel(support[i], support[i], degree) * self);
        f += coef[i] * k;
    }
    return f - rho;
}

double RankerModel::probability(const FeatureVector& raw) const {
    double z = decision(raw) * platt_a + platt_b;
    if (z >= 0) return std::exp(-z) / (1.0 + std::exp(-z));
    return 1.0 / (1.0 + std::exp(z));
}

RankerModel train(const TrainingSet& ts, int degree, double cost) {
    if (ts.rows.empty()) throw std::invalid_argument("train: empty training set");
    std::size_t n_pos = ts.count_label(1), n_neg = ts.count_label(0);
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("train: need both classes, have " + std::to_string(n_pos) +
                                    " positive and " + std::to_string(n_neg) + " negative rows");
    const std::size_t dim = ts.rows.front().features.size();
    if (dim == 0) throw std::invalid_argument("train: rows carry no features");
    for (const auto& r : ts.rows)
        if (r.features.size() != dim)
            throw std::invalid_argument("train: inconsistent feature dimensions");

    RankerModel m;
    m.dim = dim;
    m.degree = degree;
    m.cost = cost;
    m.augmented = ts.augmented;
    m.feat_min.assign(dim, 1e300);
    m.feat_max.assign(dim, -1e300);
    for (const auto& r : ts.rows) {
        for (std::size_t i = 0; i < dim; ++i) {
            m.feat_min[i] = std::min(m.feat_min[i], r.features[i]);
            m.feat_max[i] = std::max(m.feat_max[i], r.features[i]);
        }
    }

    std::vector<FeatureVector> xs(ts.rows.size());
    std::vector<double> ys(ts.rows.size());
    for (std::size_t i = 0; i < ts.rows.size(); ++i) {
        xs[i] = m.scale(ts.rows[i].features);
        ys[i] = ts.rows[i].label == 1 ? 1.0 : -1.0;
    }

    SmoResult sol = smo_solve(xs, ys, degree, cost, 1e-3);
    m.rho = sol.rho;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (sol.alpha[i] > 0.0) {
            m.support.push_back(xs[i]);
            m.coef.push_back(sol.alpha[i] * ys[i]);
        }
    }

    std::vector<double> dec(ts.rows.size());
    for (std::size_t i = 0; i < ts.rows.size(); ++i) dec[i] = m.decision(ts.rows[i].features);
    auto [pa, pb] = platt_fit(dec, ys);
    m.platt_a = pa;
    m.platt_b = pb;
    return m;
}

RankedList rescore(const RankerModel& m, const Term& target, const RankedList& pool,
                   const FeaturizeFn& featurizer, DomainTag tag) {
    if (!featurizer) throw std::invalid_argument("rescore: featurizer required");
    RankedList out;
    out.target = target;
    out.items.reserve(pool.items.size());
    for (const auto& item : pool.items) {
        FeatureVector fv = featurizer(triple_for(target, item.candidate));
        if (m.augmented) fv = augment_domains(fv, tag);
        out.items.push_back({item.candidate, m.probability(fv)});
    }
    sort_ranked(out.items);
    return out;
}

namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

double baseline_add(const Term& a, const Term& b, const Term& c, const FactorizedSpace& space,
                    SpaceView view) {
    auto va = view_vector(space, view, a);
    auto vb = view_vector(space, view, b);
    auto vc = view_vector(space, view, c);
    if (va.empty() || vb.empty() || vc.empty()) return 0.0;
    std::vector<double> sum(va.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = va[i] + vb[i];
    return cosine(sum, vc);
}

double baseline_mult(const Term& a, const Term& b, const Term& c,
                     const SparseCooccurrence& ppmi) {
    auto ra = ppmi.row_of(a);
    auto rb = ppmi.row_of(b);
    auto rc = ppmi.row_of(c);
    if (!ra || !rb || !rc) return 0.0;
    // Product row lives on the support intersection of a and b.
    double dot = 0.0, np = 0.0, nc = 0.0;
    std::size_t ia = ppmi.row_ptr[*ra], ea = ppmi.row_ptr[*ra + 1];
    std::size_t ib = ppmi.row_ptr[*rb], eb = ppmi.row_ptr[*rb + 1];
    while (ia < ea && ib < eb) {
        if (ppmi.cols[ia] < ppmi.cols[ib]) {
            ++ia;
        } else if (ppmi.cols[ia] > ppmi.cols[ib]) {
            ++ib;
        } else {
            double v = ppmi.vals[ia] * ppmi.vals[ib];
            np += v * v;
            dot += v * ppmi.at(*rc, ppmi.cols[ia]);
            ++ia;
            ++ib;
        }
    }
    for (std::size_t i = ppmi.row_ptr[*rc]; i < ppmi.row_ptr[*rc + 1]; ++i)
        nc += ppmi.vals[i] * ppmi.vals[i];
    if (np == 0.0 || nc == 0.0) return 0.0;
    return dot / (std::sqrt(np) * std::sqrt(nc));
}

double baseline_holistic(const Term& x, const Term& y, const FactorizedSpace& mono,
                         SpaceView view) {
    auto rx = mono.row_of(x);
    auto ry = mono.row_of(y);
    if (!rx || !ry) return 0.0;
    ViewScorer scorer(mono, view, *rx);
    return scorer.score_row(*ry);
}

void RankerModel::save(const std::filesystem::path& path, const std::string& config_hash,
                       std::uint64_t seed) const {
    std::ostringstream os;
    os << io::header_line({"model", 1, config_hash, seed}) << "\n";
    os << "degree\t" << degree << "\n";
    os << "cost\t" << io::fmt_full(cost) << "\n";
    os << "augmented\t" << (augmented ? 1 : 0) << "\n";
    os << "dim\t" << dim << "\n";
    os << "rho\t" << io::fmt_full(rho) << "\n";
    os << "platt\t" << io::fmt_full(platt_a) << "\t" << io::fmt_full(platt_b) << "\n";
    os << "nsv\t" << support.size() << "\n";
    for (std::size_t i = 0; i < dim; ++i)
        os << "F\t" << io::fmt_full(feat_min[i]) << "\t" << io::fmt_full(feat_max[i]) << "\n";
    for (std::size_t s = 0; s < support.size(); ++s) {
        os << "SV\t" << io::fmt_full(coef[s]);
        for (std::size_t i = 0; i < dim; ++i) os << " " << io::fmt_full(support[s][i]);
        os << "\n";
    }
    io::atomic_write(path, os.str());
}

RankerModel RankerModel::load(const std::filesystem::path& path) {
    auto is = io::open_input(path, "model file");
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty model file: " + path.string());
    io::parse_header_line(line, "model");
    RankerModel m;
    auto expect_kv = [&](const char* key) {
        if (!std::getline(is, line)) throw std::runtime_error("truncated model file");
        auto parts = io::split(line, '\t');
        if (parts.empty() || parts[0] != key)
            throw std::runtime_error(std::string("expected ") + key + " line, got: " + line);
        return std::vector<std::string>(parts.begin() + 1, parts.end());
    };
    m.degree = std::stoi(expect_kv("degree").at(0));
    m.cost = io::parse_double(expect_kv("cost").at(0));
    m.augmented = expect_kv("augmented").at(0) == "1";
    m.dim = std::stoull(expect_kv("dim").at(0));
    m.rho = io::parse_double(expect_kv("rho").at(0));
    auto platt = expect_kv("platt");
    if (platt.size() != 2) throw std::runtime_error("bad platt line");
    m.platt_a = io::parse_double(platt[0]);
    m.platt_b = io::parse_double(platt[1]);
    std::size_t nsv = std::stoull(expect_kv("nsv").at(0));
    m.feat_min.reserve(m.dim);
    m.feat_max.reserve(m.dim);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto parts = io::split(line, '\t');
        if (parts[0] == "F" && parts.size() == 3) {
            m.feat_min.push_back(io::parse_double(parts[1]));
            m.feat_max.push_back(io::parse_double(parts[2]));
        } else if (parts[0] == "SV" && parts.size() == 2) {
            auto fields = io::split(parts[1], ' ');
            if (fields.size() != m.dim + 1)
                throw std::runtime_error("bad SV line width in " + path.string());
            m.coef.push_back(io::parse_double(fields[0]));
            FeatureVector sv(m.dim);
            for (std::size_t i = 0; i < m.dim; ++i) sv[i] = io::parse_double(fields[i + 1]);
            m.support.push_back(std::move(sv));
        } else {
            throw std::runtime_error("bad model line: " + line);
        }
    }
    if (m.feat_min.size() != m.dim || m.support.size() != nsv)
        throw std::runtime_error("model file counts do not match contents: " + path.string());
    return m;
}

}  // namespace compgen
