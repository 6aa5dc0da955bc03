#include "biquad/cli.hpp"

#include "biquad/arith.hpp"
#include "biquad/decomp.hpp"
#include "biquad/f2la.hpp"
#include "biquad/kleinmod.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace biquad::cli {

using json = nlohmann::ordered_json;
namespace km = biquad::kleinmod;

namespace {

struct Options {
    std::string format = "text";
    unsigned long long seed = 1;
    long witness_bound = 10000;
    bool inject_fault = false;
    bool verbose = false;
};

json int_to_json(const arith::Int& v)
{
    if (v.fits_slong_p())
        return v.get_si();
    return v.get_str();
}

json rat_to_json(const arith::Rat& q)
{
    return q.get_str();
}

json classify_doc(const arith::BiquadParams& p, const Options& opt)
{
    arith::XClassification x = arith::classify_X(p);
    json doc;
    doc["a1"] = int_to_json(p.a1);
    doc["a2"] = int_to_json(p.a2);
    doc["a3"] = int_to_json(p.a3);
    doc["z4z2"] = {x.report.z4z2[0], x.report.z4z2[1], x.report.z4z2[2]};
    doc["d4"] = {x.report.d4[0], x.report.d4[1], x.report.d4[2]};
    doc["q8"] = x.report.q8;
    doc["im_t_dim"] = x.im_t.dim();
    json basis = json::array();
    for (const auto& b : x.im_t.basis())
        basis.push_back(b.to_string());
    doc["im_t_basis"] = basis;
    doc["x_shape"] = decomp::to_string(x.shape);

    json wits;
    const std::array<arith::Int, 3> a = {p.a1, p.a2, p.a3};
    json z4 = json::array();
    for (int i = 0; i < 3; ++i) {
        if (!x.report.z4z2[i]) {
            z4.push_back(nullptr);
            continue;
        }
        auto w = arith::two_square_witness(arith::Rat(a[i]), opt.witness_bound);
        if (w)
            z4.push_back(json{{"found", true}, {"x", rat_to_json(w->first)},
                              {"y", rat_to_json(w->second)}});
        else
            z4.push_back(json{{"found", false}});
    }
    wits["z4z2"] = z4;
    json d4 = json::array();
    for (int i = 0; i < 3; ++i) {
        if (!x.report.d4[i]) {
            d4.push_back(nullptr);
            continue;
        }
        int j = (i + 1) % 3;
        auto w = arith::norm_form_witness(arith::Rat(a[j]), arith::Rat(a[i]),
                                          opt.witness_bound);
        if (w)
            d4.push_back(json{{"found", true},
                              {"a", int_to_json(a[j])},
                              {"x", rat_to_json(w->first)},
                              {"y", rat_to_json(w->second)}});
        else
            d4.push_back(json{{"found", false}, {"a", int_to_json(a[j])}});
    }
    wits["d4"] = d4;
    if (x.report.q8) {
        auto w = arith::q8_witness_search(p, opt.witness_bound);
        if (w) {
            json e = json::array(), f = json::array();
            for (int t = 0; t < 3; ++t) {
                e.push_back(rat_to_json(w->e[t]));
                f.push_back(rat_to_json(w->f[t]));
            }
            wits["q8"] = json{{"found", true}, {"e", e}, {"f", f}};
        } else {
            wits["q8"] = json{{"found", false}};
        }
    } else {
        wits["q8"] = nullptr;
    }
    doc["witnesses"] = wits;
    return doc;
}

std::string yesno(bool b)
{
    return b ? "yes" : "no";
}

void print_classify_text(const json& doc, std::ostream& out)
{
    out << "classify a1=" << doc["a1"] << " a2=" << doc["a2"] << " a3=" << doc["a3"] << "\n";
    auto triple = [&](const char* name, const json& arr) {
        out << name << ": type1=" << yesno(arr[0].get<bool>())
            << " type2=" << yesno(arr[1].get<bool>())
            << " type3=" << yesno(arr[2].get<bool>()) << "\n";
    };
    triple("z4z2", doc["z4z2"]);
    triple("d4  ", doc["d4"]);
    out << "q8  : " << yesno(doc["q8"].get<bool>()) << "\n";
    out << "im(T): dim " << doc["im_t_dim"].get<int>() << ", basis";
    if (doc["im_t_basis"].empty())
        out << " (none)";
    for (const auto& b : doc["im_t_basis"])
        out << " " << b.get<std::string>();
    out << "\n";
    out << "X: " << doc["x_shape"].get<std::string>() << "\n";
    const json& w = doc["witnesses"];
    out << "witnesses:\n";
    bool any = false;
    for (int i = 0; i < 3; ++i) {
        if (w["z4z2"][i].is_null())
            continue;
        any = true;
        const json& e = w["z4z2"][i];
        if (e["found"].get<bool>())
            out << "  z4z2 type" << i + 1 << ": x=" << e["x"].get<std::string>()
                << " y=" << e["y"].get<std::string>() << "\n";
        else
            out << "  z4z2 type" << i + 1 << ": none below bound\n";
    }
    for (int i = 0; i < 3; ++i) {
        if (w["d4"][i].is_null())
            continue;
        any = true;
        const json& e = w["d4"][i];
        if (e["found"].get<bool>())
            out << "  d4 type" << i + 1 << ": via a=" << e["a"]
                << " x=" << e["x"].get<std::string>() << " y=" << e["y"].get<std::string>()
                << "\n";
        else
            out << "  d4 type" << i + 1 << ": none below bound\n";
    }
    if (!w["q8"].is_null()) {
        any = true;
        const json& e = w["q8"];
        if (e["found"].get<bool>()) {
            out << "  q8: e=(";
            for (int t = 0; t < 3; ++t)
                out << (t ? "," : "") << e["e"][t].get<std::string>();
            out << ") f=(";
            for (int t = 0; t < 3; ++t)
                out << (t ? "," : "") << e["f"][t].get<std::string>();
            out << ")\n";
        } else {
            out << "  q8: none below bound\n";
        }
    }
    if (!any)
        out << "  (none)\n";
}

std::string sweep_line(const json& doc)
{
    std::ostringstream os;
    auto bits = [&](const json& arr) {
        std::string s;
        for (const auto& b : arr)
            s += b.get<bool>() ? '1' : '0';
        return s;
    };
    os << "a1=" << doc["a1"] << " a2=" << doc["a2"] << " z4z2=" << bits(doc["z4z2"])
       << " d4=" << bits(doc["d4"]) << " q8=" << (doc["q8"].get<bool>() ? 1 : 0)
       << " imT_dim=" << doc["im_t_dim"].get<int>() << " X="
       << doc["x_shape"].get<std::string>();
    return os.str();
}

arith::BiquadParams reduced_params(const arith::Int& raw1, const arith::Int& raw2,
                                   std::ostream& err)
{
    arith::BiquadParams p = arith::BiquadParams::make(raw1, raw2);
    if (p.a1 != raw1)
        err << "warning: a1 reduced to its square class " << p.a1.get_str() << "\n";
    if (p.a2 != raw2)
        err << "warning: a2 reduced to its square class " << p.a2.get_str() << "\n";
    return p;
}

int cmd_classify(const std::string& a1s, const std::string& a2s, const Options& opt,
                 std::ostream& out, std::ostream& err)
{
    arith::BiquadParams p = reduced_params(arith::Int(a1s), arith::Int(a2s), err);
    json doc = classify_doc(p, opt);
    if (opt.format == "json")
        out << doc.dump(2) << "\n";
    else
        print_classify_text(doc, out);
    return 0;
}

struct ExampleSpec {
    long a1, a2;
    const char* shape;
    int im_t_dim;
};

int cmd_examples(const Options& opt, std::ostream& out, std::ostream&)
{
    static const ExampleSpec table[] = {
        {7, -5, "Zero", 0},
        {7, -1, "F2", 1},
        {2, -1, "Omega-1", 2},
        {5, 13, "F2 ⊕ F2", 2},
        {5, 41, "Undecided(Omega-2 | Omega-1 ⊕ Omega-1)", 3},
    };
    json all = json::array();
    bool all_ok = true;
    for (std::size_t idx = 0; idx < std::size(table); ++idx) {
        const auto& ex = table[idx];
        auto p = arith::BiquadParams::make(ex.a1, ex.a2);
        json doc = classify_doc(p, opt);
        if (opt.inject_fault && idx == 0)
            doc["x_shape"] = "F2";  // deliberate corruption for fault-injection tests
        bool ok = doc["x_shape"].get<std::string>() == ex.shape &&
                  doc["im_t_dim"].get<int>() == ex.im_t_dim;
        all_ok = all_ok && ok;
        json rec;
        rec["a1"] = ex.a1;
        rec["a2"] = ex.a2;
        rec["expected_x_shape"] = ex.shape;
        rec["expected_im_t_dim"] = ex.im_t_dim;
        rec["computed"] = doc;
        rec["match"] = ok;
        all.push_back(rec);
    }
    if (opt.format == "json") {
        out << all.dump(2) << "\n";
    } else {
        int matches = 0;
        for (const auto& rec : all) {
            out << "(" << rec["a1"] << ", " << rec["a2"] << "): expected X="
                << rec["expected_x_shape"].get<std::string>() << ", computed X="
                << rec["computed"]["x_shape"].get<std::string>() << " ["
                << (rec["match"].get<bool>() ? "ok" : "MISMATCH") << "]\n";
            matches += rec["match"].get<bool>() ? 1 : 0;
        }
        out << matches << "/" << all.size() << " examples match\n";
    }
    return all_ok ? 0 : 1;
}

json hat_j_doc(const km::KleinModule& m)
{
    auto targets = km::fixed_submodule(m);
    auto hj = decomp::build_hat_J(m, targets);
    json out;
    out["targets_dim"] = targets.dim();
    out["span_dim"] = hj.total.dim();
    out["verified"] = true;  // build_hat_J throws otherwise
    json summands = json::array();
    for (const auto& s : hj.summands()) {
        json gens = json::array();
        for (const auto& g : s.generators)
            gens.push_back(g.to_string());
        summands.push_back(json{{"type", s.type.name()}, {"generators", gens}});
    }
    out["summands"] = summands;
    return out;
}

int cmd_decompose(const std::string& path, const Options& opt, std::ostream& out,
                  std::ostream& err)
{
    std::ifstream in(path);
    if (!in) {
        err << "error: cannot open '" << path << "'\n";
        return 2;
    }
    km::KleinModule m;
    try {
        m = km::parse_module_text(in);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    auto bad = km::validate(m);
    if (!bad.empty()) {
        for (const auto& b : bad)
            err << "error: " << b << "\n";
        return 2;
    }
    json doc;
    doc["dim"] = m.dim;
    try {
        km::Multiplicities mult = km::multiplicities(m);
        json counts;
        for (const auto& [t, c] : mult.counts)
            counts[t.name()] = c;
        doc["multiplicities"] = counts;
        doc["dim_check_ok"] = mult.total_dim() == m.dim;
        doc["hat_j"] = hat_j_doc(m);
    } catch (const km::NotInFamily& e) {
        doc["error"] = "not in family";
        doc["detail"] = e.what();
        json funs;
        auto family = km::decomposition_family();
        auto names = km::functional_names(family);
        auto vals = km::functional_values(m, family);
        for (std::size_t i = 0; i < names.size(); ++i)
            funs[names[i]] = vals[i];
        doc["functionals"] = funs;
        if (opt.format == "json") {
            out << doc.dump(2) << "\n";
        } else {
            out << "module: dim " << m.dim << "\n";
            out << "not decomposable within the nine-type family\n";
            out << "detail: " << e.what() << "\n";
            out << "functional values:\n";
            for (std::size_t i = 0; i < names.size(); ++i)
                out << "  " << names[i] << " = " << vals[i] << "\n";
        }
        return 3;
    }
    if (opt.format == "json") {
        out << doc.dump(2) << "\n";
    } else {
        out << "module: dim " << doc["dim"] << "\n";
        out << "multiplicities:";
        for (auto it = doc["multiplicities"].begin(); it != doc["multiplicities"].end(); ++it)
            out << " " << it.key() << ":" << it.value();
        out << "\n";
        out << "dim check: " << (doc["dim_check_ok"].get<bool>() ? "ok" : "FAILED") << "\n";
        out << "hat-J: fixed classes dim " << doc["hat_j"]["targets_dim"]
            << ", span dim " << doc["hat_j"]["span_dim"] << ", verified\n";
        for (const auto& s : doc["hat_j"]["summands"]) {
            out << "  " << s["type"].get<std::string>() << " generators:";
            for (const auto& g : s["generators"])
                out << " " << g.get<std::string>();
            out << "\n";
        }
    }
    return 0;
}

int cmd_sweep(long max_abs, const Options& opt, std::ostream& out, std::ostream& err)
{
    if (max_abs < 2) {
        err << "error: sweep bound must be at least 2\n";
        return 2;
    }
    // Squarefree values ordered by (|v|, v).
    std::vector<long> values;
    for (long m = 1; m <= max_abs; ++m)
        for (long v : {-m, m}) {
            if (v == 1)
                continue;
            if (arith::squarefree_part(arith::Int(v)) == v)
                values.push_back(v);
        }
    json records = json::array();
    std::map<std::string, std::size_t> histogram;
    for (long a1 : values)
        for (long a2 : values) {
            if (std::abs(a2) < std::abs(a1) || a1 == a2)
                continue;
            auto p = arith::BiquadParams::make(a1, a2);
            json doc = classify_doc(p, opt);
            histogram[doc["x_shape"].get<std::string>()]++;
            if (opt.format == "json")
                records.push_back(std::move(doc));
            else
                out << sweep_line(doc) << "\n";
        }
    if (opt.format == "json") {
        json doc;
        doc["max_abs"] = max_abs;
        doc["records"] = records;
        json hist;
        for (const auto& [shape, n] : histogram)
            hist[shape] = n;
        doc["histogram"] = hist;
        out << doc.dump(2) << "\n";
    } else {
        out << "histogram:\n";
        for (const auto& [shape, n] : histogram)
            out << "  " << n << "  " << shape << "\n";
    }
    return 0;
}

int cmd_selftest(const Options& opt, std::ostream& out, std::ostream&)
{
    struct Check {
        std::string name;
        bool ok = false;
        std::string detail;
    };
    std::vector<Check> checks;
    std::mt19937_64 rng(opt.seed);

    // 1. The functional matrix over the canonical family separates it.
    {
        Check c;
        c.name = "gram-rank";
        try {
            const auto& g = km::gram_system(km::decomposition_family());
            c.ok = g.rank == g.family.size();
            c.detail = "rank " + std::to_string(g.rank) + " over " +
                       std::to_string(g.family.size()) + " types";
        } catch (const Error& e) {
            c.detail = e.what();
        }
        checks.push_back(c);
    }
    // 2. Hilbert product formula on random pairs.
    {
        Check c;
        c.name = "hilbert-product-formula";
        std::uniform_int_distribution<long> num(-10000, 10000), den(1, 10000);
        int failures = 0;
        const int trials = 200;
        for (int t = 0; t < trials; ++t) {
            long n1 = num(rng), n2 = num(rng);
            if (n1 == 0 || n2 == 0) {
                continue;
            }
            arith::Rat a = arith::rational(n1, den(rng));
            arith::Rat b = arith::rational(n2, den(rng));
            int prod = 1;
            for (const auto& v : arith::relevant_places(a, b))
                prod *= arith::hilbert_symbol(a, b, v);
            if (prod != 1)
                ++failures;
        }
        c.ok = failures == 0;
        c.detail = std::to_string(failures) + " failures in " + std::to_string(trials) +
                   " random pairs";
        checks.push_back(c);
    }
    // 3. Norm towers on random field elements.
    {
        Check c;
        c.name = "norm-tower";
        static const std::pair<long, long> param_table[] = {
            {7, -5}, {7, -1}, {2, -1}, {5, 13}, {5, 41}, {-6, 10}};
        std::uniform_int_distribution<long> coord(-9, 9);
        bool ok = true;
        for (const auto& [a1, a2] : param_table) {
            auto p = arith::BiquadParams::make(a1, a2);
            for (int t = 0; t < 25 && ok; ++t) {
                auto k = arith::k_element(p, arith::rational(coord(rng)),
                                          arith::rational(coord(rng)),
                                          arith::rational(coord(rng)),
                                          arith::rational(coord(rng)));
                auto full = arith::norm(k, arith::Subfield::F);
                auto via = [&](arith::Subfield sub, arith::Sigma rest) {
                    auto n = arith::norm(k, sub);
                    return arith::mult(n, arith::galois_act(rest, n));
                };
                ok = ok && via(arith::Subfield::K1, arith::Sigma::S1) == full &&
                     via(arith::Subfield::K2, arith::Sigma::S2) == full &&
                     via(arith::Subfield::K3, arith::Sigma::S1) == full;
            }
        }
        c.ok = ok;
        c.detail = ok ? "three towers agree on all samples" : "tower identity failed";
        checks.push_back(c);
    }
    // 4. Constructive factorization of base-field K3-norms.
    {
        Check c;
        c.name = "k3-norm-factorization";
        std::uniform_int_distribution<long> coord(-9, 9);
        auto p = arith::BiquadParams::make(7, -5);
        int done = 0, failures = 0;
        while (done < 100) {
            long f0 = coord(rng), f1 = coord(rng), f2 = coord(rng);
            arith::Rat c0 = arith::rational(f0), c1 = arith::rational(f1),
                       c2 = arith::rational(f2), c3;
            if (f0 != 0)
                c3 = c1 * c2 / c0;
            else if (f1 != 0 && f2 != 0)
                continue;
            auto k = arith::k_element(p, c0, c1, c2, c3);
            arith::NormSplit s;
            try {
                s = arith::factor_k3_norm(k);
            } catch (const arith::DegenerateNorm&) {
                continue;
            }
            arith::Rat a1(p.a1), a2(p.a2);
            if ((s.h1 * s.h1 - a1 * s.h2 * s.h2) * (s.h3 * s.h3 - a2 * s.h4 * s.h4) !=
                arith::norm(k, arith::Subfield::K3).coords[0])
                ++failures;
            ++done;
        }
        c.ok = failures == 0;
        c.detail = std::to_string(failures) + " failures in 100 factorizations";
        checks.push_back(c);
    }

    bool all_ok = true;
    std::string first_fail;
    for (const auto& c : checks) {
        if (!c.ok && first_fail.empty())
            first_fail = c.name;
        all_ok = all_ok && c.ok;
    }
    if (opt.format == "json") {
        json doc;
        json arr = json::array();
        for (const auto& c : checks)
            arr.push_back(json{{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
        doc["checks"] = arr;
        doc["ok"] = all_ok;
        if (opt.verbose) {
            const auto& g = km::gram_system(km::decomposition_family());
            json m = json::array();
            for (const auto& row : g.matrix)
                m.push_back(row);
            doc["functional_matrix"] = m;
        }
        out << doc.dump(2) << "\n";
    } else {
        for (const auto& c : checks)
            out << "check " << c.name << ": " << (c.ok ? "ok" : "FAILED") << " (" << c.detail
                << ")\n";
        if (opt.verbose) {
            const auto& g = km::gram_system(km::decomposition_family());
            auto names = km::functional_names(g.family);
            out << "functional matrix (rows = functionals, columns = family):\n";
            for (std::size_t i = 0; i < g.matrix.size(); ++i) {
                out << "  ";
                for (auto v : g.matrix[i])
                    out << v << " ";
                out << "  # " << names[i] << "\n";
            }
        }
        if (!all_ok)
            out << "first failing check: " << first_fail << "\n";
    }
    return all_ok ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Klein four-group module decomposition and biquadratic classification"};
    app.require_subcommand(1);
    Options opt;
    app.add_option("--format", opt.format, "Output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    app.add_option("--seed", opt.seed, "Seed for randomized checks")->capture_default_str();
    app.add_option("--witness-bound", opt.witness_bound, "Search bound for witnesses")
        ->capture_default_str();

    std::string a1s, a2s, path;
    long max_abs = 0;

    CLI::App* classify = app.add_subcommand("classify", "Classify one biquadratic extension");
    classify->add_option("a1", a1s, "first square class")->required();
    classify->add_option("a2", a2s, "second square class")->required();

    CLI::App* examples = app.add_subcommand("examples", "Reproduce the five worked examples");
    examples->add_flag("--inject-fault", opt.inject_fault,
                       "corrupt one answer (for fault-injection tests)");

    CLI::App* decompose = app.add_subcommand("decompose", "Decompose a module file");
    decompose->add_option("file", path, "module file")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "Classify all pairs up to a bound");
    sweep->add_option("max_abs", max_abs, "bound on |a1|, |a2|")->required();

    CLI::App* selftest = app.add_subcommand("selftest", "Run the built-in checks");
    selftest->add_flag("--verbose", opt.verbose, "print the functional matrix");

    for (CLI::App* sub : {classify, examples, decompose, sweep, selftest})
        sub->fallthrough();

    std::vector<const char*> argv;
    argv.push_back("biquad");
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (classify->parsed())
            return cmd_classify(a1s, a2s, opt, out, err);
        if (examples->parsed())
            return cmd_examples(opt, out, err);
        if (decompose->parsed())
            return cmd_decompose(path, opt, out, err);
        if (sweep->parsed())
            return cmd_sweep(max_abs, opt, out, err);
        if (selftest->parsed())
            return cmd_selftest(opt, out, err);
    } catch (const arith::InvalidParams& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const arith::ZeroInput& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: bad integer argument (" << e.what() << ")\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no subcommand\n";
    return 2;
}

}  // namespace biquad::cli
