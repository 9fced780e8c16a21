#pragma once

// Command-line front end. Every subcommand prints one JSON document with keys
// in a fixed order; numbers are decimal strings so values survive any JSON
// reader exactly.
//
// Exit codes: 0 success, 2 invalid input (with {error, detail} on stderr),
// 3 internal invariant violation.

#include "arithorb/exact_arith.hpp"
#include "arithorb/field_invariants.hpp"
#include "arithorb/growth_bound.hpp"
#include "arithorb/spinor.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <ostream>
#include <regex>
#include <string>
#include <vector>

namespace arithorb::cli {

using Json = nlohmann::ordered_json;

/// Environment variable holding the default precision (bits) of growth-bound.
inline constexpr const char* precision_env = "ARITHORB_PRECISION_BITS";

inline TotallyRealField parse_field(const std::string& s, int id_place)
{
    static const std::regex quadratic(R"(^Q\(\s*sqrt\s*\(?\s*([0-9]+)\s*\)?\s*\)$)");
    if (s == "Q") {
        if (id_place != 0) throw std::invalid_argument("Q has a single real place 0");
        return TotallyRealField::rationals();
    }
    std::smatch m;
    if (!std::regex_match(s, m, quadratic) || m[1].length() > 18) {
        throw std::invalid_argument("field must be Q or Q(sqrt D), got '" + s + "'");
    }
    return TotallyRealField::real_quadratic(std::stoll(m[1].str()), id_place);
}

inline Vector parse_form_coefficients(const std::string& s, const TotallyRealField& k)
{
    Vector out;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = s.find(',', start);
        out.push_back(FieldElement::parse(s.substr(start, comma - start)).lifted_to(k));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

inline FieldElement element_from_json(const Json& j, const TotallyRealField& k)
{
    if (j.is_string()) return FieldElement::parse(j.get<std::string>()).lifted_to(k);
    if (j.is_number_integer()) return FieldElement::in(k, j.get<long long>());
    throw std::invalid_argument("matrix entries must be element strings or integers");
}

inline Matrix parse_matrix(const std::string& s, const TotallyRealField& k)
{
    Json j;
    try {
        j = Json::parse(s);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(std::string("matrix is not valid JSON: ") + e.what());
    }
    if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix must be a non-empty JSON array of rows");
    std::vector<Vector> rows;
    for (const auto& row : j) {
        if (!row.is_array()) throw std::invalid_argument("matrix rows must be JSON arrays");
        Vector r;
        for (const auto& e : row) r.push_back(element_from_json(e, k));
        rows.push_back(std::move(r));
    }
    return Matrix::from_rows(rows);
}

inline Json to_json(const FieldElement& x) { return x.to_string(); }

inline Json to_json(const Vector& v)
{
    Json out = Json::array();
    for (const auto& x : v) out.push_back(to_json(x));
    return out;
}

inline Json to_json(const Matrix& m)
{
    Json out = Json::array();
    for (const auto& row : m.rows()) out.push_back(to_json(row));
    return out;
}

inline Json to_json(const FieldInvariants& inv)
{
    Json j;
    j["field"] = inv.field.name();
    j["h"] = inv.h.str();
    j["h2"] = inv.h2.str();
    j["h_plus"] = inv.h_plus.str();
    j["fundamental_unit"] = inv.units.fundamental_unit ? Json(inv.units.fundamental_unit->to_string()) : Json(nullptr);
    j["unit_norm"] = inv.units.unit_norm ? Json(std::to_string(*inv.units.unit_norm)) : Json(nullptr);
    j["unit_index_infinity"] = inv.units.unit_index_infinity.str();
    j["h_inf_2"] = inv.h_inf_2.str();
    j["uniqueness_certified"] = inv.uniqueness_certified;
    return j;
}

inline Json to_json(const NormalizerReport& r)
{
    Json j;
    j["field"] = r.field.name();
    j["n"] = std::to_string(r.n);
    j["form"] = to_json(r.form.coefficients());
    j["sign_flipped"] = r.sign_flipped;
    j["theta_set"] = to_json(r.theta_set);
    j["index_gamma_lambda"] = r.index_gamma_lambda.str();
    j["witness"] = to_json(r.witness->matrix());
    j["witness_preserves_form"] = r.witness_preserves_form;
    j["witness_stabilizes_lattice"] = r.witness_stabilizes_lattice;
    j["witness_in_so0"] = r.witness_in_so0;
    j["witness_spinor_class"] = r.witness_spinor_class->to_string();
    j["witness_class_in_theta_set"] = r.witness_class_in_theta_set;
    j["theta_set_in_k_infinity_star"] = r.theta_set_in_k_infinity_star;
    return j;
}

inline int digits_for(mpfr_prec_t bits) { return static_cast<int>(static_cast<double>(bits) * 0.30103) + 2; }

inline Json to_json(const GrowthBoundValue& v)
{
    Json j;
    j["r"] = std::to_string(v.r);
    j["degree"] = std::to_string(v.degree);
    j["numerator"] = v.exact_numerator.str();
    j["pi_power"] = std::to_string(v.pi_power);
    j["float_value"] = v.float_value.to_string(digits_for(v.precision_bits));
    j["precision_bits"] = std::to_string(v.precision_bits);
    return j;
}

inline Json to_json(const GrowthCertificate& c)
{
    Json j;
    j["r_max"] = std::to_string(c.r_max);
    Json rows = Json::array();
    for (const auto& row : c.rows) {
        Json x = to_json(row.value);
        x["ratio_identity"] = row.ratio_identity;
        x["increases"] = row.increases;
        x["normalized_increases"] = row.normalized_increases;
        rows.push_back(std::move(x));
    }
    j["rows"] = std::move(rows);
    j["ratio_identity_all"] = c.ratio_identity_all;
    if (c.threshold) {
        j["threshold"] = std::to_string(*c.threshold);
    } else {
        j["threshold"] = "threshold not reached";
    }
    j["normalized_threshold"] = c.normalized_threshold ? Json(std::to_string(*c.normalized_threshold)) : Json(nullptr);
    return j;
}

/// One row of a sweep: the invariant bundle plus the analytic cross-check.
inline Json sweep_row(std::int64_t d)
{
    auto k = TotallyRealField::real_quadratic(d);
    FieldInvariants inv = restricted_class_number(k);
    Integer oracle = analytic_class_number_oracle(d);
    Integer D = fundamental_discriminant(d);
    int t = distinct_prime_count(D);
    Integer genus = Integer(1) << static_cast<unsigned>(t - 1);
    Json j;
    j["d"] = std::to_string(d);
    j["discriminant"] = D.str();
    Json body = to_json(inv);
    body.erase("field");
    for (auto& [key, value] : body.items()) j[key] = value;
    j["h_oracle"] = oracle.str();
    j["oracle_agreement"] = oracle == inv.h;
    j["discriminant_prime_count"] = std::to_string(t);
    j["genus_divisibility"] = inv.h_plus % genus == 0;
    return j;
}

inline Json sweep(std::int64_t dmin, std::int64_t dmax, unsigned jobs)
{
    if (dmin < 2 || dmax < dmin) throw std::invalid_argument("sweep range must satisfy 2 <= dmin <= dmax");
    std::vector<std::int64_t> ds;
    for (std::int64_t d = dmin; d <= dmax; ++d) {
        if (detail::is_squarefree(d)) ds.push_back(d);
    }
    std::vector<Json> rows(ds.size());
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(ds.size())));
    std::vector<std::future<void>> tasks;
    for (unsigned w = 0; w < jobs; ++w) {
        tasks.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < ds.size(); i += jobs) rows[i] = sweep_row(ds[i]);
        }));
    }
    for (auto& t : tasks) t.get();
    Json j;
    Json range = Json::array();
    for (auto d : ds) range.push_back(std::to_string(d));
    j["range"] = std::move(range);
    bool all = true;
    for (const auto& r : rows) all = all && r["oracle_agreement"].get<bool>();
    j["rows"] = std::move(rows);
    j["all_oracle_agreement"] = all;
    return j;
}

inline Json error_document(const std::string& kind, const std::string& detail)
{
    Json j;
    j["error"] = kind;
    j["detail"] = detail;
    return j;
}

inline mpfr_prec_t default_precision()
{
    if (const char* env = std::getenv(precision_env)) {
        try {
            long v = std::stol(env);
            if (v >= 64) return static_cast<mpfr_prec_t>(v);
        } catch (const std::exception&) {
        }
        throw std::invalid_argument(std::string(precision_env) + " must be an integer >= 64");
    }
    return 128;
}

/// Runs one command line (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exact invariants of arithmetic hyperbolic orbifold groups", "arithorb"};
    app.require_subcommand(1);
    std::string out_path;
    app.add_option("--out", out_path, "Also write the JSON document to this file");

    std::string field_str;
    int id_place = 0;
    auto add_field = [&](CLI::App* sub, bool id) {
        sub->add_option("--field", field_str, "Q or \"Q(sqrt D)\"")->required();
        if (id) sub->add_option("--id-place", id_place, "Index of the distinguished real place (0: sqrt D > 0)");
    };

    auto* fi = app.add_subcommand("field-invariants", "Class numbers, units and h_inf_2 of a field");
    add_field(fi, true);

    std::string form_str, matrix_str, pivot_str;
    auto* sn = app.add_subcommand("spinor-norm", "Spinor norm of an isometry of a diagonal form");
    add_field(sn, true);
    sn->add_option("--form", form_str, "Comma-separated diagonal coefficients")->required();
    sn->add_option("--matrix", matrix_str, "JSON array of rows of element strings")->required();

    auto* dc = app.add_subcommand("decompose", "Cartan-Dieudonne reflection decomposition");
    add_field(dc, true);
    dc->add_option("--form", form_str, "Comma-separated diagonal coefficients")->required();
    dc->add_option("--matrix", matrix_str, "JSON array of rows of element strings")->required();
    dc->add_option("--pivot-order", pivot_str, "Comma-separated permutation of basis indices");

    int n = 0;
    auto* cn = app.add_subcommand("check-normalizer", "Normalizer index for the Q and Q(sqrt 5) cases");
    add_field(cn, true);
    cn->add_option("--n", n, "Even dimension n >= 4")->required();

    unsigned r = 0, degree = 1, certify = 0;
    long precision = 0;
    auto* gb = app.add_subcommand("growth-bound", "Euler characteristic lower bound");
    auto* r_opt = gb->add_option("--r", r, "Half dimension r >= 1");
    gb->add_option("--degree", degree, "[k:Q]");
    gb->add_option("--precision", precision, "Bits of precision (>= 64)");
    auto* certify_opt = gb->add_option("--certify", certify, "Ratio table up to r_max");
    r_opt->excludes(certify_opt);

    std::int64_t dmin = 2, dmax = 0;
    unsigned jobs = 1;
    auto* sw = app.add_subcommand("sweep", "Invariants and analytic cross-check for squarefree d in a range");
    sw->add_option("--dmin", dmin, "Smallest d (default 2)");
    sw->add_option("--dmax", dmax, "Largest d")->required();
    sw->add_option("--jobs", jobs, "Parallel workers");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << error_document("usage", e.what()).dump() << "\n";
        return 2;
    }

    try {
        Json result;
        if (fi->parsed()) {
            result = to_json(restricted_class_number(parse_field(field_str, id_place)));
        } else if (sn->parsed() || dc->parsed()) {
            auto k = parse_field(field_str, id_place);
            DiagonalForm f(k, parse_form_coefficients(form_str, k));
            Isometry g = Isometry::orthogonal(f, parse_matrix(matrix_str, k));
            ReflectionDecomposition dec;
            if (!pivot_str.empty()) {
                std::vector<std::size_t> order;
                std::size_t start = 0;
                for (;;) {
                    std::size_t comma = pivot_str.find(',', start);
                    order.push_back(std::stoul(pivot_str.substr(start, comma - start)));
                    if (comma == std::string::npos) break;
                    start = comma + 1;
                }
                dec = cartan_dieudonne_decompose(g, order);
            } else {
                dec = cartan_dieudonne_decompose(g);
            }
            SquareClass cls = spinor_norm(dec, f);
            if (sn->parsed()) {
                result["spinor_class"] = cls.to_string();
                result["in_k_infinity_star"] = cls.in_k_infinity_star();
                result["in_so0"] = admissibility_check(f) ? Json(so0_membership(g)) : Json(nullptr);
                result["decomposition_length"] = std::to_string(dec.length());
                result["special"] = g.is_special();
            } else {
                Json vecs = Json::array(), values = Json::array();
                for (const auto& v : dec.vectors) {
                    vecs.push_back(to_json(v));
                    values.push_back(to_json(f.value(v)));
                }
                result["vectors"] = std::move(vecs);
                result["form_values"] = std::move(values);
                result["length"] = std::to_string(dec.length());
                result["recomposition_exact"] = recompose(dec, f) == g.matrix();
                result["spinor_class"] = cls.to_string();
                result["special"] = g.is_special();
            }
        } else if (cn->parsed()) {
            result = to_json(normalizer_index_check(parse_field(field_str, id_place), n));
        } else if (gb->parsed()) {
            mpfr_prec_t bits = precision != 0 ? static_cast<mpfr_prec_t>(precision) : default_precision();
            if (bits < 64) throw std::invalid_argument("precision must be at least 64 bits");
            if (certify_opt->count() > 0) {
                result = to_json(superexponential_certificate(certify, bits));
            } else if (r_opt->count() > 0) {
                result = to_json(euler_char_bound(r, degree, bits));
            } else {
                throw std::invalid_argument("growth-bound needs --r or --certify");
            }
        } else if (sw->parsed()) {
            result = sweep(dmin, dmax, jobs);
        }
        std::string doc = result.dump(2) + "\n";
        if (!out_path.empty()) {
            std::ofstream file(out_path, std::ios::binary);
            if (!file) throw std::invalid_argument("cannot open output file '" + out_path + "'");
            file << doc;
        }
        out << doc;
        return 0;
    } catch (const InternalError& e) {
        err << error_document("internal", e.what()).dump() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << error_document("invalid_input", e.what()).dump() << "\n";
        return 2;
    }
}

} // namespace arithorb::cli
