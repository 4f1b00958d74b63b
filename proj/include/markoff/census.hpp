#pragma once
/**
 * Level classification and range census for the integral surfaces
 *
 *     x^2 + y^2 + z^2 - x y z = m.
 *
 * classify() composes the other modules into exactly one verdict per level:
 *
 *   SINGULAR                m in {0, 4}: the surface has singular points.
 *   NOT_LOCALLY_SOLVABLE    some completion has no integral points; happens
 *                           exactly for m = 3 mod 4 (at 2) or m = +-3 mod 9
 *                           (at 3).  The congruence test is cross-checked
 *                           against the exact residue-disk search at both
 *                           primes on every level.
 *   HAS_INTEGRAL_POINT      complete descent found a solution (the smallest
 *                           fundamental representative is the witness).
 *   BM_EMPTY                no solution, and the algebraic obstruction
 *                           certificate proves every adelic selection is
 *                           inconsistent.
 *   BM_NONEMPTY_NO_POINT    no solution, yet a consistent adelic selection
 *                           exists: the failure is not explained by the
 *                           algebraic obstruction alone.
 *   UNKNOWN_TRANSCENDENTAL  no solution, a consistent selection exists, but
 *                           the obstruction group has a transcendental class
 *                           of order 2 this computation does not evaluate.
 *
 * Verdicts are mutually exclusive.  Every nonsingular row carries the full
 * obstruction certificate (re-verified from scratch), so HAS_INTEGRAL_POINT
 * rows also expose their nonempty adelic selection.
 *
 * Families.  Four named families of levels are recognized by pure arithmetic,
 * independently of the verdicts:
 *
 *   bm/r=R           m = 4 + R v^2 for R in {2, -2, -3, 12, -12}, v >= 1 with
 *                    every prime factor in fixed residue classes (+-1 mod 8
 *                    for R = 2; +-1 mod 12 and v^2 = 25 mod 32 for R = 12;
 *                    1 or 3 mod 8 for R = -2; 1 mod 3 for R = -3, -12; v = 1
 *                    excluded for R = -2, -3).  The congruences pin the local
 *                    invariant sums away from zero, so each admissible member
 *                    has an empty obstruction set.
 *   beyond-bm/r=R    m = 4 + R l^2 with l a single prime (l >= 13 and
 *                    l = +-4 mod 9 for R = 2; l >= 37, l^2 = 25 mod 32 and
 *                    1 + 3 l^2 not a sum of two squares for R = 12; l >= 13,
 *                    17, 37 for R = -2, -3, -12).  Descent pushes a
 *                    hypothetical solution below l, where the product formula
 *                    for the local invariants rules it out: no integral
 *                    point, even though the obstruction set itself is
 *                    typically nonempty.
 *   20v2             m = 4 + 20 v^2, v > 1 with every prime factor +-1 mod 5;
 *                    admissible members have an empty obstruction set.
 *   density-positive m = 4 + 2 a^2 l^2 with l = 19 mod 72 prime and a odd,
 *                    a = +-4 mod 9, every prime factor of a +-1 mod 8, and
 *                    100 a^2 < 49 l (the window a < 0.7 sqrt(l) that keeps
 *                    the reduced coordinate below l).  The counting family of
 *                    positive levels with no integral point; its smallest
 *                    member is 4 + 2 * 23^2 * 1171^2 = 1450772982.
 *
 * census() classifies a whole range on a worker pool.  Rows are stored by
 * slot, so the rendered output is byte-identical for every job count.
 */

#include <algorithm>
#include <atomic>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "markoff/descent.hpp"
#include "markoff/local_brauer.hpp"

namespace markoff {

// ---------------------------------------------------------------------------
// Family recognition.

/** One family member with its defining parameters. */
struct FamilyMember {
    i64 m = 0;
    std::string family;
    i64 r = 0;  // coefficient of the square in m - 4 (20 for the 20v2 family)
    i64 v = 0;  // root of the square factor; v = a * l for density-positive
    i64 a = 0;  // odd cofactor, density-positive only
    i64 l = 0;  // prime part, density-positive only
    bool admissible = false;
};

namespace family_detail {

inline bool residue_in(i64 n, i64 mod, std::initializer_list<i64> allowed) {
    const i64 r = mod_math(n, mod);
    for (const i64 x : allowed)
        if (r == x) return true;
    return false;
}

inline bool prime_factors_in(i64 v, i64 mod, std::initializer_list<i64> allowed) {
    for (const auto& [p, e] : factorize_abs_i64(v))
        if (!residue_in(static_cast<i64>(p), mod, allowed)) return false;
    return true;
}

/** n >= 0 is a sum of two squares iff every prime 3 mod 4 divides it evenly. */
inline bool sum_of_two_squares(i64 n) {
    if (n < 0) return false;
    if (n == 0) return true;
    for (const auto& [p, e] : factorize_abs_i64(n))
        if (p % 4 == 3 && e % 2 == 1) return false;
    return true;
}

/** Scale condition for the bm families: m = 4 + r v^2 obstructed outright. */
inline bool bm_scale_ok(i64 r, i64 v) {
    if (v < 1) return false;
    const i64 v32 = mod_math(v, 32);
    switch (r) {
        case 2: return prime_factors_in(v, 8, {1, 7});
        case 12: return mod_math(v32 * v32, 32) == 25 && prime_factors_in(v, 12, {1, 11});
        case -2: return v != 1 && prime_factors_in(v, 8, {1, 3});
        case -3: return v != 1 && prime_factors_in(v, 3, {1});
        case -12: return prime_factors_in(v, 3, {1});
        default: return false;
    }
}

/** Prime-level condition for the beyond-bm families: m = 4 + r l^2. */
inline bool beyond_bm_level_ok(i64 r, i64 l) {
    if (!is_prime_i64(l)) return false;
    const i64 l32 = mod_math(l, 32);
    switch (r) {
        case 2: return l >= 13 && residue_in(l, 9, {4, 5});
        case 12:
            return l >= 37 && mod_math(l32 * l32, 32) == 25 &&
                   !sum_of_two_squares(1 + 3 * l * l);
        case -2: return l >= 13;
        case -3: return l >= 17;
        case -12: return l >= 37;
        default: return false;
    }
}

inline bool twenty_scale_ok(i64 v) { return v > 1 && prime_factors_in(v, 5, {1, 4}); }

inline bool star_cofactor_ok(i64 a) {
    return a >= 1 && a % 2 == 1 && residue_in(a, 9, {4, 5}) && prime_factors_in(a, 8, {1, 7});
}

/** The counting window a < 0.7 sqrt(l), exactly: 100 a^2 < 49 l. */
inline bool star_window_ok(i64 a, i64 l) { return i128(100) * a * a < i128(49) * l; }

inline bool density_prime_ok(i64 l) { return mod_math(l, 72) == 19 && is_prime_i64(l); }

inline constexpr i64 kScales[] = {2, -2, -3, 12, -12};

}  // namespace family_detail

/** Sorted family tags of one level, recognized by pure arithmetic. */
inline std::vector<std::string> family_tags(i64 m) {
    std::vector<std::string> tags;
    for (const i64 r : family_detail::kScales) {
        if ((m - 4) % r != 0) continue;
        const i64 q = (m - 4) / r;
        if (q < 1) continue;
        const auto v = perfect_square_i64(q);
        if (!v) continue;
        if (family_detail::bm_scale_ok(r, *v)) tags.push_back("bm/r=" + std::to_string(r));
        if (family_detail::beyond_bm_level_ok(r, *v))
            tags.push_back("beyond-bm/r=" + std::to_string(r));
    }
    if ((m - 4) % 20 == 0 && (m - 4) / 20 >= 1) {
        const auto v = perfect_square_i64((m - 4) / 20);
        if (v && family_detail::twenty_scale_ok(*v)) tags.push_back("20v2");
    }
    if (m > 4 && (m - 4) % 2 == 0) {
        if (const auto w = perfect_square_i64((m - 4) / 2)) {
            for (const auto& [p, e] : factorize_abs_i64(*w)) {
                const i64 l = static_cast<i64>(p);
                if (!family_detail::density_prime_ok(l)) continue;
                const i64 a = *w / l;
                if (family_detail::star_cofactor_ok(a) && family_detail::star_window_ok(a, l)) {
                    tags.push_back("density-positive");
                    break;
                }
            }
        }
    }
    std::sort(tags.begin(), tags.end());
    return tags;
}

inline const std::vector<std::string>& family_ids() {
    static const std::vector<std::string> ids = {
        "bm/r=2",        "bm/r=-2",        "bm/r=-3",        "bm/r=12",        "bm/r=-12",
        "beyond-bm/r=2", "beyond-bm/r=-2", "beyond-bm/r=-3", "beyond-bm/r=12", "beyond-bm/r=-12",
        "20v2",          "density-positive"};
    return ids;
}

/**
 * All members of one family with |m| <= N, ascending in m, with their
 * defining parameters and the local-solvability flag.  N >= 5 required;
 * unknown ids are rejected.
 */
inline std::vector<FamilyMember> family_members(const std::string& id, i64 N) {
    if (N < 5) throw std::domain_error("family bound must be at least 5");
    const auto& ids = family_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
        std::string msg = "unknown family id \"" + id + "\" (known:";
        for (const auto& k : ids) msg += " " + k;
        throw std::domain_error(msg + ")");
    }
    std::vector<FamilyMember> out;
    auto emit = [&](i64 m, i64 r, i64 v, i64 a, i64 l) {
        out.push_back({m, id, r, v, a, l, is_admissible(m)});
    };
    const bool bm = id.rfind("bm/r=", 0) == 0;
    const bool beyond = id.rfind("beyond-bm/r=", 0) == 0;
    if (bm || beyond) {
        const i64 r = std::stoll(id.substr(id.find("r=") + 2));
        for (i64 v = 1;; ++v) {
            const i128 lvl = i128(4) + i128(r) * v * v;
            if (r > 0 ? lvl > N : lvl < -i128(N)) break;
            const i64 m = static_cast<i64>(lvl);
            if (bm && family_detail::bm_scale_ok(r, v)) emit(m, r, v, 0, 0);
            if (beyond && family_detail::beyond_bm_level_ok(r, v)) emit(m, r, v, 0, 0);
        }
    } else if (id == "20v2") {
        for (i64 v = 2;; ++v) {
            const i128 lvl = i128(4) + i128(20) * v * v;
            if (lvl > N) break;
            if (family_detail::twenty_scale_ok(v)) emit(static_cast<i64>(lvl), 20, v, 0, 0);
        }
    } else {  // density-positive
        for (i64 l = 19; i128(2) * l * l <= i128(N) - 4; l += 72) {
            if (!family_detail::density_prime_ok(l)) continue;
            for (i64 a = 1; family_detail::star_window_ok(a, l); a += 2) {
                const i128 lvl = i128(4) + i128(2) * a * a * l * l;
                if (lvl > N) break;
                if (family_detail::star_cofactor_ok(a))
                    emit(static_cast<i64>(lvl), 2, a * l, a, l);
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const FamilyMember& x, const FamilyMember& y) { return x.m < y.m; });
    return out;
}

// ---------------------------------------------------------------------------
// Classification of one level.

enum class Verdict {
    singular,
    not_locally_solvable,
    has_integral_point,
    bm_empty,
    bm_nonempty_no_point,
    unknown_transcendental,
    error,
};

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::singular: return "SINGULAR";
        case Verdict::not_locally_solvable: return "NOT_LOCALLY_SOLVABLE";
        case Verdict::has_integral_point: return "HAS_INTEGRAL_POINT";
        case Verdict::bm_empty: return "BM_EMPTY";
        case Verdict::bm_nonempty_no_point: return "BM_NONEMPTY_NO_POINT";
        case Verdict::unknown_transcendental: return "UNKNOWN_TRANSCENDENTAL";
        case Verdict::error: return "ERROR";
    }
    return "?";
}

namespace census_detail {

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out;
}

}  // namespace census_detail

/** One classified level: the verdict with its supporting data. */
struct Classification {
    i64 m = 0;
    Verdict verdict = Verdict::error;
    std::optional<Triple> witness;            // integral point, when one exists
    std::optional<i64> bad_prime;             // failing place, when unsolvable
    std::optional<BMCertificate> certificate; // present on every nonsingular level
    std::vector<std::string> families;
    std::string error;                        // nonempty when the pipeline failed

    std::string witness_cell() const {
        switch (verdict) {
            case Verdict::has_integral_point: return witness ? witness->str() : "";
            case Verdict::not_locally_solvable:
                return bad_prime ? "p=" + std::to_string(*bad_prime) : "";
            case Verdict::bm_empty:
            case Verdict::bm_nonempty_no_point:
            case Verdict::unknown_transcendental:
                return certificate ? certificate->proof_line() : "";
            default: return "";
        }
    }

    std::string families_cell() const {
        std::string out;
        for (const auto& f : families) {
            if (!out.empty()) out += ' ';
            out += f;
        }
        return out;
    }

    std::string csv_row() const {
        using census_detail::csv_escape;
        std::ostringstream os;
        os << m << ',' << verdict_name(verdict) << ',' << csv_escape(witness_cell()) << ','
           << csv_escape(families_cell()) << ',' << csv_escape(error);
        return os.str();
    }

    std::string json_line() const {
        using census_detail::json_escape;
        std::ostringstream os;
        os << "{\"m\": " << m << ", \"verdict\": \"" << verdict_name(verdict) << "\"";
        os << ", \"families\": [";
        for (size_t i = 0; i < families.size(); ++i)
            os << (i ? ", " : "") << "\"" << families[i] << "\"";
        os << "]";
        os << ", \"witness\": ";
        if (witness)
            os << "[" << witness->x << ", " << witness->y << ", " << witness->z << "]";
        else
            os << "null";
        os << ", \"bad_prime\": ";
        if (bad_prime)
            os << *bad_prime;
        else
            os << "null";
        os << ", \"certificate\": " << (certificate ? certificate->json() : "null");
        os << ", \"error\": ";
        if (error.empty())
            os << "null";
        else
            os << "\"" << json_escape(error) << "\"";
        os << "}";
        return os.str();
    }
};

/**
 * The full pipeline for one level: singularity, local solvability at 2 and 3
 * (congruence test cross-checked against the exact disk search), complete
 * descent, and the obstruction decision with a re-verified certificate.
 * Throws on internal inconsistencies; census() records those per row.
 */
inline Classification classify(const SurfaceParams& sp) {
    Classification row;
    row.m = sp.m;
    row.families = family_tags(sp.m);
    if (sp.is_singular()) {
        row.verdict = Verdict::singular;
        return row;
    }

    const bool two = !local_value_set(sp, 2).empty();
    const bool three = !local_value_set(sp, 3).empty();
    if (two != (mod_math(sp.m, 4) != 3))
        throw std::logic_error("2-adic solvability disagrees with the congruence test");
    const i64 r9 = mod_math(sp.m, 9);
    if (three != (r9 != 3 && r9 != 6))
        throw std::logic_error("3-adic solvability disagrees with the congruence test");

    row.certificate = bm_decide(sp);
    if (!row.certificate->verify())
        throw std::logic_error("obstruction certificate failed re-verification");

    if (!two || !three) {
        row.verdict = Verdict::not_locally_solvable;
        row.bad_prime = two ? 3 : 2;
        return row;
    }

    if (const auto pt = has_integral_point(sp)) {
        if (row.certificate->verdict == BMVerdict::empty)
            throw std::logic_error("integral point on a level with an empty obstruction set");
        row.witness = *pt;
        row.verdict = Verdict::has_integral_point;
        return row;
    }

    switch (row.certificate->verdict) {
        case BMVerdict::empty: row.verdict = Verdict::bm_empty; break;
        case BMVerdict::nonempty: row.verdict = Verdict::bm_nonempty_no_point; break;
        case BMVerdict::unknown_transcendental:
            row.verdict = Verdict::unknown_transcendental;
            break;
    }
    return row;
}

inline Classification classify(i64 m) { return classify(SurfaceParams(m)); }

/**
 * Independent re-audit of one row.  Recomputes the family tags, re-verifies
 * the certificate, re-decides integral-point existence, and checks the
 * verdict-specific field shape plus family soundness: admissible bm/20v2
 * members must be BM_EMPTY, beyond-bm and density members must carry a
 * no-point verdict.  Returns the list of violations (empty when clean).
 */
inline std::vector<std::string> invariant_violations(const Classification& row) {
    std::vector<std::string> bad;
    auto flag = [&](const std::string& s) { bad.push_back(s); };
    if (row.verdict == Verdict::error || !row.error.empty()) {
        flag("errored: " + row.error);
        return bad;
    }
    const SurfaceParams sp(row.m);
    if (family_tags(row.m) != row.families) flag("family tags not reproducible");
    if ((row.verdict == Verdict::singular) != sp.is_singular())
        flag("singularity verdict mismatch");
    if (sp.is_singular()) {
        if (row.witness || row.certificate || row.bad_prime)
            flag("singular row carries extra data");
        return bad;
    }
    if (!row.certificate) {
        flag("missing obstruction certificate");
        return bad;
    }
    if (row.certificate->m != row.m) flag("certificate level mismatch");
    if (!row.certificate->verify()) flag("certificate failed re-verification");
    const bool adm = is_admissible(row.m);
    if ((row.verdict == Verdict::not_locally_solvable) != !adm)
        flag("solvability verdict disagrees with the congruence test");
    const auto point = has_integral_point(sp);
    switch (row.verdict) {
        case Verdict::not_locally_solvable:
            if (!row.bad_prime ||
                *row.bad_prime != (mod_math(row.m, 4) == 3 ? 2 : 3))
                flag("local failure place mismatch");
            if (!row.certificate->local_failure ||
                row.certificate->verdict != BMVerdict::empty)
                flag("local failure certificate mismatch");
            if (row.witness) flag("witness on an unsolvable level");
            break;
        case Verdict::has_integral_point:
            if (!row.witness) {
                flag("missing integral witness");
                break;
            }
            if (!on_surface(sp, *row.witness)) flag("witness off the surface");
            if (!point || *point != *row.witness) flag("witness not reproducible");
            if (row.certificate->verdict == BMVerdict::empty)
                flag("integral point inside an empty obstruction set");
            break;
        case Verdict::bm_empty:
            if (row.certificate->verdict != BMVerdict::empty ||
                row.certificate->local_failure)
                flag("verdict does not match the certificate");
            if (point) flag("integral point on an obstructed level");
            break;
        case Verdict::bm_nonempty_no_point:
            if (row.certificate->verdict != BMVerdict::nonempty)
                flag("verdict does not match the certificate");
            if (point) flag("integral point exists but the row claims none");
            break;
        case Verdict::unknown_transcendental:
            if (row.certificate->verdict != BMVerdict::unknown_transcendental)
                flag("verdict does not match the certificate");
            if (point) flag("integral point exists but the row claims none");
            break;
        default: flag("unexpected verdict"); break;
    }
    for (const std::string& tag : row.families) {
        const bool bm_fam = tag.rfind("bm/", 0) == 0;
        const bool beyond = tag.rfind("beyond-bm/", 0) == 0;
        const bool twenty = tag == "20v2";
        const bool density = tag == "density-positive";
        if ((bm_fam || twenty) && adm && row.verdict != Verdict::bm_empty)
            flag("family " + tag + ": admissible member is not BM_EMPTY");
        if (beyond || density) {
            if (!adm) flag("family " + tag + ": member unexpectedly unsolvable");
            if (row.verdict != Verdict::bm_empty &&
                row.verdict != Verdict::bm_nonempty_no_point)
                flag("family " + tag + ": member lacks a no-point verdict");
        }
    }
    return bad;
}

// ---------------------------------------------------------------------------
// The range census.

enum class CensusFormat { csv, jsonl };

/** classify() with per-level error capture instead of propagation. */
inline Classification classify_or_record(i64 m) {
    try {
        return classify(SurfaceParams(m));
    } catch (const std::exception& e) {
        Classification row;
        row.m = m;
        row.verdict = Verdict::error;
        row.error = e.what();
        try {
            row.families = family_tags(m);
        } catch (...) {
        }
        return row;
    }
}

struct CensusReport {
    i64 from = 0;
    i64 to = 0;
    std::vector<Classification> rows;  // ascending m, one per level

    int errors() const {
        int n = 0;
        for (const auto& r : rows)
            if (!r.error.empty()) ++n;
        return n;
    }

    std::map<std::string, i64> verdict_counts() const {
        std::map<std::string, i64> out;
        for (const auto& r : rows) ++out[verdict_name(r.verdict)];
        return out;
    }

    std::map<std::string, i64> family_counts() const {
        std::map<std::string, i64> out;
        for (const auto& r : rows)
            for (const auto& f : r.families) ++out[f];
        return out;
    }

    /** Byte-deterministic table: header, one row per level, summary tail. */
    std::string render(CensusFormat f) const {
        std::ostringstream os;
        if (f == CensusFormat::csv) {
            os << "m,verdict,witness,families,error\n";
            for (const auto& r : rows) os << r.csv_row() << "\n";
            os << "# verdicts:";
            for (const auto& [k, n] : verdict_counts()) os << " " << k << "=" << n;
            os << "\n# families:";
            for (const auto& [k, n] : family_counts()) os << " " << k << "=" << n;
            os << "\n# errors: " << errors() << "\n";
        } else {
            for (const auto& r : rows) os << r.json_line() << "\n";
            os << "{\"summary\": {\"from\": " << from << ", \"to\": " << to
               << ", \"verdicts\": {";
            bool first = true;
            for (const auto& [k, n] : verdict_counts()) {
                os << (first ? "" : ", ") << "\"" << k << "\": " << n;
                first = false;
            }
            os << "}, \"families\": {";
            first = true;
            for (const auto& [k, n] : family_counts()) {
                os << (first ? "" : ", ") << "\"" << k << "\": " << n;
                first = false;
            }
            os << "}, \"errors\": " << errors() << "}}\n";
        }
        return os.str();
    }
};

/**
 * Classifies every level in [from, to] on a pool of `jobs` workers.  Each
 * worker writes its own slot, so the result is independent of scheduling.
 */
inline CensusReport census(i64 from, i64 to, int jobs = 1) {
    if (from > to) throw std::domain_error("census range is empty");
    if (jobs < 1) throw std::domain_error("census needs at least one worker");
    CensusReport rep;
    rep.from = from;
    rep.to = to;
    const size_t n = static_cast<size_t>(to - from + 1);
    rep.rows.resize(n);
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= n) return;
            rep.rows[i] = classify_or_record(from + static_cast<i64>(i));
        }
    };
    if (jobs == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(jobs));
        for (int j = 0; j < jobs; ++j) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return rep;
}

}  // namespace markoff
