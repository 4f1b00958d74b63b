// include/markoff/picard.hpp — integer linear algebra (Smith form, kernels, lattice
// quotients) and Galois cohomology of the geometric Picard lattices.
#pragma once

#include "markoff/surface.hpp"

#include <functional>
#include <map>
#include <string>

namespace markoff {

/** Dense integer matrix, row-major; matrices act on column vectors. */
using Mat = std::vector<std::vector<Int>>;
using Vec = std::vector<Int>;

inline Mat mat_zero(std::size_t n, std::size_t m) { return Mat(n, Vec(m, 0)); }

inline Mat mat_identity(std::size_t n) {
    Mat I = mat_zero(n, n);
    for (std::size_t i = 0; i < n; ++i) I[i][i] = 1;
    return I;
}

inline std::size_t mat_rows(const Mat& a) { return a.size(); }
inline std::size_t mat_cols(const Mat& a) { return a.empty() ? 0 : a[0].size(); }

inline Mat mat_mul(const Mat& a, const Mat& b) {
    std::size_t n = mat_rows(a), k = mat_cols(a), m = mat_cols(b);
    if (k != mat_rows(b)) throw std::invalid_argument("matrix shape mismatch");
    Mat c = mat_zero(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < k; ++t) {
            if (a[i][t] == 0) continue;
            for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][t] * b[t][j];
        }
    return c;
}

inline Vec mat_vec(const Mat& a, const Vec& v) {
    std::size_t n = mat_rows(a), k = mat_cols(a);
    if (k != v.size()) throw std::invalid_argument("matrix shape mismatch");
    Vec out(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) out[i] += a[i][j] * v[j];
    return out;
}

inline Mat mat_add(const Mat& a, const Mat& b, Int sb = 1) {
    Mat c = a;
    for (std::size_t i = 0; i < mat_rows(a); ++i)
        for (std::size_t j = 0; j < mat_cols(a); ++j) c[i][j] += sb * b[i][j];
    return c;
}

inline Mat mat_transpose(const Mat& a) {
    Mat t = mat_zero(mat_cols(a), mat_rows(a));
    for (std::size_t i = 0; i < mat_rows(a); ++i)
        for (std::size_t j = 0; j < mat_cols(a); ++j) t[j][i] = a[i][j];
    return t;
}

/** Columns of `a` restricted to indices [from, to). */
inline Mat mat_col_slice(const Mat& a, std::size_t from, std::size_t to) {
    Mat s = mat_zero(mat_rows(a), to - from);
    for (std::size_t i = 0; i < mat_rows(a); ++i)
        for (std::size_t j = from; j < to; ++j) s[i][j - from] = a[i][j];
    return s;
}

/** Horizontal concatenation [a | b]. */
inline Mat mat_hcat(const Mat& a, const Mat& b) {
    if (mat_rows(a) != mat_rows(b)) throw std::invalid_argument("matrix shape mismatch");
    Mat c = a;
    for (std::size_t i = 0; i < mat_rows(a); ++i)
        c[i].insert(c[i].end(), b[i].begin(), b[i].end());
    return c;
}

/**
 * Smith normal form with transforms: u * a * v = d with u, v unimodular and d
 * diagonal, nonnegative, each entry dividing the next.  uinv is u^-1 (kept so
 * lattice bases can be read off without a separate inversion).
 */
struct SmithForm {
    Mat u, uinv, d, v;
    std::size_t rank = 0;

    /** Diagonal entry i (0 beyond the stored diagonal). */
    Int diag(std::size_t i) const {
        return i < mat_rows(d) && i < mat_cols(d) ? d[i][i] : Int(0);
    }
};

inline SmithForm smith_form(Mat a) {
    const std::size_t n = mat_rows(a), m = mat_cols(a);
    SmithForm s{mat_identity(n), mat_identity(n), {}, mat_identity(m), 0};
    Mat& d = a;

    auto row_swap = [&](std::size_t i, std::size_t j) {
        std::swap(d[i], d[j]);
        std::swap(s.u[i], s.u[j]);
        for (std::size_t r = 0; r < n; ++r) std::swap(s.uinv[r][i], s.uinv[r][j]);
    };
    auto row_add = [&](std::size_t i, std::size_t j, const Int& c) {  // row_i += c * row_j
        for (std::size_t t = 0; t < m; ++t) d[i][t] += c * d[j][t];
        for (std::size_t t = 0; t < n; ++t) s.u[i][t] += c * s.u[j][t];
        for (std::size_t t = 0; t < n; ++t) s.uinv[t][j] -= c * s.uinv[t][i];
    };
    auto row_neg = [&](std::size_t i) {
        for (std::size_t t = 0; t < m; ++t) d[i][t] = -d[i][t];
        for (std::size_t t = 0; t < n; ++t) s.u[i][t] = -s.u[i][t];
        for (std::size_t t = 0; t < n; ++t) s.uinv[t][i] = -s.uinv[t][i];
    };
    auto col_swap = [&](std::size_t i, std::size_t j) {
        for (std::size_t r = 0; r < n; ++r) std::swap(d[r][i], d[r][j]);
        for (std::size_t r = 0; r < m; ++r) std::swap(s.v[r][i], s.v[r][j]);
    };
    auto col_add = [&](std::size_t i, std::size_t j, const Int& c) {  // col_i += c * col_j
        for (std::size_t r = 0; r < n; ++r) d[r][i] += c * d[r][j];
        for (std::size_t r = 0; r < m; ++r) s.v[r][i] += c * s.v[r][j];
    };

    // Nearest-integer quotient, so remainders stay at most half the divisor.
    auto near_div = [](const Int& a, const Int& b) {
        Int q = a / b, r = a - q * b;
        if (2 * abs(r) > abs(b)) q += ((a < 0) == (b < 0)) ? 1 : -1;
        return q;
    };

    std::size_t t = 0;
    while (t < n && t < m) {
        // Locate a pivot: the smallest-magnitude nonzero entry of the region.
        std::size_t pi = t, pj = t;
        bool found = false;
        for (std::size_t i = t; i < n; ++i)
            for (std::size_t j = t; j < m; ++j) {
                if (d[i][j] == 0) continue;
                if (!found || abs(d[i][j]) < abs(d[pi][pj])) { pi = i; pj = j; found = true; }
            }
        if (!found) break;
        if (pi != t) row_swap(t, pi);
        if (pj != t) col_swap(t, pj);

        while (true) {
            // Clear the pivot column and row; a nonzero remainder becomes the
            // new (strictly smaller) pivot, so this inner loop terminates.
            bool dirty = true;
            while (dirty) {
                dirty = false;
                for (std::size_t i = t + 1; i < n; ++i) {
                    if (d[i][t] == 0) continue;
                    Int q = near_div(d[i][t], d[t][t]);
                    if (q != 0) row_add(i, t, -q);
                    if (d[i][t] != 0) { row_swap(t, i); dirty = true; }
                }
                for (std::size_t j = t + 1; j < m; ++j) {
                    if (d[t][j] == 0) continue;
                    Int q = near_div(d[t][j], d[t][t]);
                    if (q != 0) col_add(j, t, -q);
                    if (d[t][j] != 0) { col_swap(t, j); dirty = true; }
                }
            }
            // Make the pivot divide the whole remaining region: fold one
            // offending row into the pivot row and re-clear.  Each fold
            // replaces the pivot by a proper divisor, so few rounds occur,
            // and the final diagonal automatically satisfies the chain.
            bool divides = true;
            for (std::size_t i = t + 1; i < n && divides; ++i)
                for (std::size_t j = t + 1; j < m && divides; ++j)
                    if (d[i][j] % d[t][t] != 0) {
                        row_add(t, i, 1);
                        divides = false;
                    }
            if (divides) break;
        }
        if (d[t][t] < 0) row_neg(t);
        ++t;
    }
    s.rank = t;
    s.d = d;
    return s;
}

inline Int floor_div(const Int& a, const Int& b) {
    Int q = a / b, r = a - q * b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline Int round_rat(const Rat& x) {
    return floor_div(2 * x.numerator() + x.denominator(), 2 * x.denominator());
}

/**
 * Lenstra-Lenstra-Lovasz reduction of an independent set of lattice vectors
 * (columns), in exact rational arithmetic.  Same lattice, short basis; used to
 * keep the bases produced by Smith-form transforms from snowballing.
 */
inline Mat lll_reduce(Mat b) {
    const std::size_t k = mat_cols(b), n = mat_rows(b);
    if (k <= 1) return b;
    auto col_dot = [&](std::size_t i, const std::vector<Rat>& w) {
        Rat s(0);
        for (std::size_t r = 0; r < n; ++r) s += Rat(b[r][i]) * w[r];
        return s;
    };
    std::vector<std::vector<Rat>> star(k, std::vector<Rat>(n));  // Gram-Schmidt vectors
    std::vector<std::vector<Rat>> mu(k, std::vector<Rat>(k));
    std::vector<Rat> norm(k);
    auto gram_schmidt = [&] {
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t r = 0; r < n; ++r) star[i][r] = Rat(b[r][i]);
            for (std::size_t j = 0; j < i; ++j) {
                mu[i][j] = norm[j] == Rat(0) ? Rat(0) : col_dot(i, star[j]) / norm[j];
                for (std::size_t r = 0; r < n; ++r) star[i][r] -= mu[i][j] * star[j][r];
            }
            norm[i] = Rat(0);
            for (std::size_t r = 0; r < n; ++r) norm[i] += star[i][r] * star[i][r];
            if (norm[i] == Rat(0)) throw std::invalid_argument("lll_reduce: dependent columns");
        }
    };
    gram_schmidt();
    const Rat delta(3, 4);
    std::size_t i = 1;
    while (i < k) {
        bool changed = false;
        for (std::size_t j = i; j-- > 0;) {
            Int c = round_rat(mu[i][j]);
            if (c != 0) {
                for (std::size_t r = 0; r < n; ++r) b[r][i] -= c * b[r][j];
                changed = true;
            }
        }
        if (changed) gram_schmidt();
        if (norm[i] >= (delta - mu[i][i - 1] * mu[i][i - 1]) * norm[i - 1]) {
            ++i;
        } else {
            for (std::size_t r = 0; r < n; ++r) std::swap(b[r][i], b[r][i - 1]);
            gram_schmidt();
            i = i > 1 ? i - 1 : 1;
        }
    }
    return b;
}

/** Basis of the integer kernel of a (columns of the result). */
inline Mat kernel_basis(const Mat& a) {
    SmithForm s = smith_form(a);
    Mat raw = mat_col_slice(s.v, s.rank, mat_cols(a));
    return mat_cols(raw) == 0 ? raw : lll_reduce(raw);
}

/** One integer solution of a * x = b, if any. */
inline std::optional<Vec> solve_integer(const Mat& a, const Vec& b) {
    SmithForm s = smith_form(a);
    Vec ub = mat_vec(s.u, b);
    Vec y(mat_cols(a), 0);
    for (std::size_t i = 0; i < ub.size(); ++i) {
        Int di = s.diag(i);
        if (di == 0) {
            if (ub[i] != 0) return std::nullopt;
        } else {
            if (ub[i] % di != 0) return std::nullopt;
            y[i] = ub[i] / di;
        }
    }
    return mat_vec(s.v, y);
}

/** Basis of the lattice generated by the columns of `gens`. */
inline Mat lattice_basis(const Mat& gens) {
    SmithForm s = smith_form(gens);
    // gens * Z^m = uinv * d * Z^m, so the nonzero columns of uinv * d form a basis.
    Mat basis = mat_zero(mat_rows(gens), s.rank);
    for (std::size_t j = 0; j < s.rank; ++j) {
        Int dj = s.diag(j);
        for (std::size_t i = 0; i < mat_rows(gens); ++i) basis[i][j] = dj * s.uinv[i][j];
    }
    return mat_cols(basis) == 0 ? basis : lll_reduce(basis);
}

/**
 * A finite abelian group in invariant-factor form: factors f_1 | f_2 | ...,
 * all > 1; the trivial group has no factors.
 */
struct FiniteAbelianGroup {
    std::vector<Int> factors;

    Int order() const {
        Int o = 1;
        for (const Int& f : factors) o *= f;
        return o;
    }

    friend bool operator==(const FiniteAbelianGroup& a, const FiniteAbelianGroup& b) {
        return a.factors == b.factors;
    }

    std::string str() const {
        if (factors.empty()) return "0";
        std::string out;
        for (std::size_t i = 0; i < factors.size();) {
            std::size_t j = i;
            while (j < factors.size() && factors[j] == factors[i]) ++j;
            if (!out.empty()) out += " x ";
            std::ostringstream os;
            if (j - i > 1) os << "(Z/" << factors[i] << ")^" << (j - i);
            else os << "Z/" << factors[i];
            out += os.str();
            i = j;
        }
        return out;
    }
};

/** Direct sum, renormalized to invariant-factor form via primary decomposition. */
inline FiniteAbelianGroup group_direct_sum(const FiniteAbelianGroup& a, const FiniteAbelianGroup& b) {
    std::map<u64, std::vector<int>> primary;  // prime -> exponents, one per cyclic factor
    auto absorb = [&](const FiniteAbelianGroup& g) {
        for (const Int& f : g.factors) {
            u64 fv = checked_i64(f) > 0 ? static_cast<u64>(checked_i64(f)) : 0;
            for (auto [p, e] : factorize_u64(fv)) primary[p].push_back(e);
        }
    };
    absorb(a);
    absorb(b);
    std::size_t layers = 0;
    for (auto& [p, es] : primary) {
        std::sort(es.begin(), es.end(), std::greater<int>());
        layers = std::max(layers, es.size());
    }
    std::vector<Int> factors(layers, 1);
    for (auto& [p, es] : primary)
        for (std::size_t i = 0; i < es.size(); ++i) {
            Int pe = 1;
            for (int t = 0; t < es[i]; ++t) pe *= p;
            factors[i] *= pe;  // slot 0 gets the largest powers
        }
    std::sort(factors.begin(), factors.end());
    return FiniteAbelianGroup{factors};
}

/**
 * Invariants of the finite quotient L1 / L2 of full-column-rank lattices with
 * L2 a finite-index sublattice of L1 (columns of `sub` must lie in the span of
 * the columns of `basis`).
 */
inline FiniteAbelianGroup finite_quotient(const Mat& basis, const Mat& sub) {
    std::size_t k = mat_cols(basis);
    if (k == 0) {
        return FiniteAbelianGroup{};
    }
    Mat coords = mat_zero(k, mat_cols(sub));
    for (std::size_t j = 0; j < mat_cols(sub); ++j) {
        Vec col(mat_rows(sub));
        for (std::size_t i = 0; i < mat_rows(sub); ++i) col[i] = sub[i][j];
        auto c = solve_integer(basis, col);
        if (!c) throw std::invalid_argument("finite_quotient: sublattice escapes the basis");
        for (std::size_t i = 0; i < k; ++i) coords[i][j] = (*c)[i];
    }
    SmithForm s = smith_form(coords);
    if (s.rank < k) throw std::invalid_argument("finite_quotient: quotient has free rank");
    FiniteAbelianGroup g;
    for (std::size_t i = 0; i < k; ++i)
        if (s.diag(i) > 1) g.factors.push_back(s.diag(i));
    return g;
}

/**
 * Tate cohomology H^{-1}(C2, M) = ker(1 + g) / im(1 - g) for an involution g
 * acting on Z^n.  By 2-periodicity this is also H^1(C2, M).
 */
inline FiniteAbelianGroup tate_h_minus1(const Mat& g) {
    std::size_t n = mat_rows(g);
    Mat I = mat_identity(n);
    if (!(mat_mul(g, g) == I)) throw std::invalid_argument("tate_h_minus1: not an involution");
    Mat K = kernel_basis(mat_add(I, g));
    return finite_quotient(K, mat_add(I, g, -1));
}

/**
 * H^1(G, M) for G = C2 x C2 = <s, t> acting by commuting involutions.
 *
 * Primary route: inhomogeneous cocycles.  A cocycle is determined by the pair
 * (u, v) = (c(s), c(t)) subject to (1+s)u = 0, (1+t)v = 0, (1-t)u = (1-s)v;
 * coboundaries are ((s-1)w, (t-1)w).  The quotient is computed by Smith form.
 *
 * Cross-check: the inflation-restriction sequence for the subgroup <t> splits
 * off H^1(<s>, M^t), and the restriction image lands in H^1(<t>, M); the two
 * orders must multiply out, and for these modules the invariant lists agree.
 * A mismatch throws.
 */
inline FiniteAbelianGroup h1_klein_four(const Mat& s, const Mat& t) {
    std::size_t n = mat_rows(s);
    Mat I = mat_identity(n);
    if (!(mat_mul(s, s) == I) || !(mat_mul(t, t) == I) || !(mat_mul(s, t) == mat_mul(t, s)))
        throw std::invalid_argument("h1_klein_four: need commuting involutions");

    // Cocycle lattice inside M + M.
    Mat Z = mat_zero(3 * n, 2 * n);
    Mat sp1 = mat_add(I, s), tp1 = mat_add(I, t);
    Mat sm1 = mat_add(s, I, -1), tm1 = mat_add(t, I, -1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Z[i][j] = sp1[i][j];
            Z[n + i][n + j] = tp1[i][j];
            Z[2 * n + i][j] = -tm1[i][j];          // (1 - t) u
            Z[2 * n + i][n + j] = sm1[i][j];       // - (1 - s) v
        }
    Mat K = kernel_basis(Z);
    Mat B = mat_zero(2 * n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            B[i][j] = sm1[i][j];
            B[n + i][j] = tm1[i][j];
        }
    FiniteAbelianGroup h1 = finite_quotient(K, B);

    // Inflation-restriction cross-check.
    Mat fixed_t = kernel_basis(tm1);  // basis of M^t
    FiniteAbelianGroup inflated;
    if (mat_cols(fixed_t) > 0) {
        // s restricted to M^t, in the fixed-lattice coordinates.
        Mat s_fix = mat_zero(mat_cols(fixed_t), mat_cols(fixed_t));
        Mat s_on_fixed = mat_mul(s, fixed_t);
        for (std::size_t j = 0; j < mat_cols(fixed_t); ++j) {
            Vec col(n);
            for (std::size_t i = 0; i < n; ++i) col[i] = s_on_fixed[i][j];
            auto c = solve_integer(fixed_t, col);
            if (!c) throw std::logic_error("h1_klein_four: fixed lattice is not s-stable");
            for (std::size_t i = 0; i < mat_cols(fixed_t); ++i) s_fix[i][j] = (*c)[i];
        }
        inflated = tate_h_minus1(s_fix);
    }
    // Restriction image in H^1(<t>, M): project cocycles to their t-component.
    Mat P = mat_zero(n, mat_cols(K));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < mat_cols(K); ++j) P[i][j] = K[n + i][j];
    Mat L1 = lattice_basis(mat_hcat(P, tm1));
    FiniteAbelianGroup restricted = finite_quotient(L1, tm1);

    FiniteAbelianGroup expected = group_direct_sum(inflated, restricted);
    if (h1.order() != expected.order())
        throw std::logic_error("h1_klein_four: cross-check order mismatch (" + h1.str() +
                               " vs " + expected.str() + ")");
    if (!(h1 == expected))
        throw std::logic_error("h1_klein_four: cross-check invariant mismatch (" + h1.str() +
                               " vs " + expected.str() + ")");
    return h1;
}

// ---------------------------------------------------------------------------
// The Picard lattices of the compactified surface and of the complement of the
// three lines at infinity, with the Galois actions that occur for each shape
// of the class pair (m, d).

/** Intersection form on the rank-7 lattice (l, l_1..l_6): diag(1, -1, ..., -1). */
inline Mat picard_intersection_form() {
    Mat J = mat_identity(7);
    for (std::size_t i = 1; i < 7; ++i) J[i][i] = -1;
    return J;
}

inline bool preserves_form(const Mat& g, const Mat& J) {
    return mat_mul(mat_transpose(g), mat_mul(J, g)) == J;
}

/** sigma: the conjugation of sqrt(d) over Q, on the rank-7 lattice. */
inline Mat picard7_sigma() {
    Mat M = mat_zero(7, 7);
    M[0][0] = 5;
    for (std::size_t i = 1; i < 7; ++i) M[i][0] = -2;
    for (std::size_t j = 1; j <= 3; ++j) {
        M[0][j] = 2;
        for (std::size_t i = 1; i < 7; ++i) M[i][j] = (i == j + 3) ? 0 : -1;
    }
    for (std::size_t j = 4; j < 7; ++j) {
        M[0][j] = 2;
        for (std::size_t i = 1; i < 7; ++i) M[i][j] = (i == j - 3) ? 0 : -1;
    }
    return M;
}

/** tau: the conjugation of sqrt(m) over Q, on the rank-7 lattice. */
inline Mat picard7_tau() {
    Mat M = mat_zero(7, 7);
    M[0][0] = 2;
    for (std::size_t i = 4; i < 7; ++i) M[i][0] = -1;
    for (std::size_t j = 1; j <= 3; ++j) M[j][j] = 1;
    for (std::size_t j = 4; j < 7; ++j) {
        M[0][j] = 1;
        for (std::size_t i = 4; i < 7; ++i) M[i][j] = (i == j) ? 0 : -1;
    }
    return M;
}

/** rho = sigma tau: the conjugation of sqrt(md), on the rank-7 lattice. */
inline Mat picard7_rho() {
    Mat sigma = picard7_sigma();
    Mat M = mat_zero(7, 7);
    M[0][0] = 4;
    for (std::size_t i = 1; i <= 3; ++i) M[i][0] = -2;
    for (std::size_t i = 4; i < 7; ++i) M[i][0] = -1;
    for (std::size_t j = 1; j <= 3; ++j)
        for (std::size_t i = 0; i < 7; ++i) M[i][j] = sigma[i][j];
    for (std::size_t j = 4; j < 7; ++j) {
        M[0][j] = 1;
        for (std::size_t i = 1; i <= 3; ++i) M[i][j] = (i == j - 3) ? 0 : -1;
    }
    return M;
}

/** The same three conjugations on the rank-4 lattice of the open surface. */
inline Mat picard4_sigma() {
    Mat M = mat_identity(4);
    for (std::size_t i = 0; i < 4; ++i) M[i][i] = -1;
    return M;
}

inline Mat picard4_tau() {
    Mat M = mat_identity(4);
    M[0][3] = -1; M[1][3] = 1; M[2][3] = 1; M[3][3] = -1;
    return M;
}

inline Mat picard4_rho() {
    Mat M = mat_zero(4, 4);
    for (std::size_t i = 0; i < 3; ++i) M[i][i] = -1;
    M[0][3] = 1; M[1][3] = -1; M[2][3] = -1; M[3][3] = 1;
    return M;
}

/** One displayed cohomology table entry. */
struct PicardTable {
    std::string lattice;    // "closure" (rank 7) or "complement" (rank 4)
    std::string case_name;  // generic / md-square / m-square
    FiniteAbelianGroup h1;
};

/**
 * The six cohomology groups that control the Brauer classes: H^1 of the Galois
 * group acting on both lattices, for the three nontrivial class-pair shapes.
 * (In the d-square case the action is trivial and H^1 vanishes.)
 */
inline std::vector<PicardTable> picard_tables() {
    std::vector<PicardTable> out;
    out.push_back({"closure", "generic", h1_klein_four(picard7_sigma(), picard7_tau())});
    out.push_back({"closure", "md-square", tate_h_minus1(picard7_rho())});
    out.push_back({"closure", "m-square", tate_h_minus1(picard7_sigma())});
    out.push_back({"complement", "generic", h1_klein_four(picard4_sigma(), picard4_tau())});
    out.push_back({"complement", "md-square", tate_h_minus1(picard4_rho())});
    out.push_back({"complement", "m-square", tate_h_minus1(picard4_sigma())});
    return out;
}

}  // namespace markoff
