#include "membrane/scenario.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "membrane/errors.hpp"
#include "membrane/model.hpp"
#include "membrane/montecarlo.hpp"
#include "membrane/multiwalk.hpp"
#include "membrane/sojourn_gf.hpp"
#include "membrane/torus.hpp"
#include "membrane/verify.hpp"

namespace membrane::cli {

namespace {

using nlohmann::json;
using walk1d::Site;

// A usage error detected after CLI11 parsing (e.g. an unknown method name).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Rational parse_exact(const std::string& text) {
    Rational r;
    if (!parse_rational(text, r)) throw UsageError("cannot parse probability '" + text + "'");
    return r;
}

double parse_float(const std::string& text) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw UsageError("cannot parse probability '" + text + "'");
    }
    if (pos != text.size() || !std::isfinite(v)) throw UsageError("cannot parse probability '" + text + "'");
    return v;
}

template <Field T>
T parse_p(const std::string& text) {
    if constexpr (std::is_same_v<T, Rational>) {
        return parse_exact(text);
    } else {
        return parse_float(text);
    }
}

Topology topology_of(const Scenario& s) {
    if (s.model == "line") return Line{};
    if (s.model == "torus") {
        if (s.period < 2) throw DomainError("the torus needs --N >= 2");
        return Torus{s.period};
    }
    throw UsageError("unknown model '" + s.model + "' (expected line or torus)");
}

template <Field T>
WalkModel<T> model_of(const Scenario& s) {
    return WalkModel<T>::make(parse_p<T>(s.p), s.receptors, s.starts, topology_of(s));
}

// A pmf either in the scenario's field or, for simulation, as estimates.
template <Field T>
struct DistResult {
    std::optional<SojournDistribution<T>> exact;
    std::optional<montecarlo::McEstimate> mc;
};

template <Field T>
DistResult<T> compute_dist(const Scenario& s) {
    const auto m = model_of<T>(s);
    DistResult<T> out;
    const std::string& method = s.method;
    if (method == "closed") {
        if (m.on_torus() || m.walkers() != 1 || m.receptors.size() != 1 || m.starts[0] != m.receptors[0])
            throw DomainError("the closed form needs the line, one walker, one receptor and a start on it");
        out.exact = sojourn_gf::closed_form_l1r1(m.params, s.n);
    } else if (method == "gf") {
        if (m.walkers() != 1) throw DomainError("the gf route handles one walker; use dp or mc");
        if (s.order < s.n)
            throw OrderTooLow("truncation order " + std::to_string(s.order) + " is below n = " + std::to_string(s.n));
        if (m.on_torus()) {
            out.exact = torus::torus_sojourn_dist(m, s.n, s.order);
        } else if (m.is_receptor(m.starts[0])) {
            out.exact = sojourn_gf::sojourn_dist_gf(m, s.n, s.order);
        } else {
            out.exact = sojourn_gf::sojourn_dist_offstart(m, s.n, s.order);
        }
        out.exact->meta["order"] = std::to_string(s.order);
    } else if (method == "qconv") {
        out.exact = sojourn_gf::sojourn_dist_qconv(m, s.n);
    } else if (method == "dp") {
        out.exact = multiwalk::sojourn_dist_dp(m, s.n);
    } else if (method == "mc") {
        out.mc = montecarlo::simulate_sojourn(m, s.n, s.samples, s.seed);
    } else {
        throw UsageError("unknown method '" + method + "' (expected gf, dp, mc, qconv or closed)");
    }
    return out;
}

template <Field T>
json value_json(const T& v) {
    if constexpr (std::is_same_v<T, Rational>) {
        return format_value(v);
    } else {
        return v;
    }
}

std::string field_name(const Scenario& s) { return is_exact(s.p) ? "exact" : "float"; }

template <Field T>
void emit_dist(const Scenario& s, const DistResult<T>& d, std::ostream& out) {
    if (s.format == "csv") {
        out << "k,probability\n";
        for (std::size_t k = 0; k <= s.n; ++k)
            out << k << ',' << (d.exact ? format_value(d.exact->pmf[k]) : format_value(d.mc->pmf_hat[k])) << '\n';
        return;
    }
    json j;
    j["scenario"] = to_json(s);
    j["method"] = s.method;
    json meta = json::object();
    json pmf = json::array();
    if (d.exact) {
        j["field"] = field_name(s);
        for (const auto& [key, value] : d.exact->meta) meta[key] = value;
        for (const auto& v : d.exact->pmf) pmf.push_back(value_json(v));
    } else {
        j["field"] = "float";
        meta["samples"] = d.mc->samples;
        meta["seed"] = d.mc->seed;
        meta["p_used"] = d.mc->p;
        meta["counts"] = d.mc->counts;
        meta["stderr"] = d.mc->stderr_hat;
        meta["workers"] = montecarlo::worker_count();
        for (double v : d.mc->pmf_hat) pmf.push_back(v);
    }
    j["meta"] = meta;
    j["pmf"] = pmf;
    out << j.dump(2) << '\n';
}

template <Field T>
void run_dist(const Scenario& s, std::ostream& out) {
    emit_dist(s, compute_dist<T>(s), out);
}

template <Field T, Field U>
void emit_moments(const Scenario& s, const multiwalk::Moments<T>& id, const multiwalk::Moments<U>& pm,
                  const std::string& field, std::ostream& out) {
    if (s.format == "csv") {
        out << "quantity,identity,pmf\n";
        out << "mean," << format_value(id.mean) << ',' << format_value(pm.mean) << '\n';
        out << "second," << format_value(id.second) << ',' << format_value(pm.second) << '\n';
        out << "variance," << format_value(id.variance) << ',' << format_value(pm.variance) << '\n';
        return;
    }
    json j;
    j["scenario"] = to_json(s);
    j["field"] = field;
    j["method"] = s.method;
    j["identity"] = {{"mean", value_json(id.mean)}, {"second", value_json(id.second)},
                     {"variance", value_json(id.variance)}};
    j["pmf"] = {{"mean", value_json(pm.mean)}, {"second", value_json(pm.second)},
                {"variance", value_json(pm.variance)}};
    out << j.dump(2) << '\n';
}

template <Field T>
void run_moments(const Scenario& s, std::ostream& out) {
    const auto m = model_of<T>(s);
    const auto id = multiwalk::sojourn_moments(m, s.n);
    const auto d = compute_dist<T>(s);
    if (d.exact) {
        emit_moments(s, id, multiwalk::moments_from_pmf(std::span<const T>(d.exact->pmf)), field_name(s), out);
    } else {
        emit_moments(s, id, multiwalk::moments_from_pmf(std::span<const double>(d.mc->pmf_hat)), field_name(s), out);
    }
}

struct HittingRequest {
    std::string p;
    Site from = 0;
    std::vector<Site> levels;
    std::size_t max_j = 0;
    bool spectral = false;
    std::string format = "csv";
};

// Named columns of hitting-time pmfs over j = 1..J.
struct HittingTable {
    std::vector<std::string> names;
    std::vector<std::vector<json>> columns;
    std::vector<std::vector<std::string>> text;
    std::optional<json> defect;
    std::string law;
};

template <Field T>
void add_column(HittingTable& t, const std::string& name, const std::vector<T>& coeffs) {
    t.names.push_back(name);
    std::vector<json> js;
    std::vector<std::string> tx;
    for (std::size_t j = 1; j < coeffs.size(); ++j) {
        js.push_back(value_json(coeffs[j]));
        tx.push_back(format_value(coeffs[j]));
    }
    t.columns.push_back(std::move(js));
    t.text.push_back(std::move(tx));
}

template <Field T>
std::vector<T> coefficients(const series::TruncatedSeries<T>& s, std::size_t max_j) {
    std::vector<T> out;
    for (std::size_t j = 0; j <= max_j; ++j) out.push_back(s.at(j));
    return out;
}

template <Field T>
HittingTable hitting_table(const HittingRequest& r) {
    const auto w = walk1d::WalkParams<T>::make(parse_p<T>(r.p));
    const std::vector<Site>& lv = r.levels;
    for (std::size_t i = 1; i < lv.size(); ++i)
        if (lv[i] <= lv[i - 1]) throw DomainError("--levels must be strictly increasing");
    const Site x = r.from;
    const std::size_t jmax = r.max_j;
    HittingTable t;

    auto two_sided = [&](Site a, Site b) {
        t.law = "two-sided a=" + std::to_string(a) + " b=" + std::to_string(b);
        if (r.spectral) {
            if constexpr (std::is_same_v<T, double>) {
                const auto [minus, plus] = walk1d::hitting_pmf_two_sided_spectral(w, x, a, b, jmax);
                std::vector<double> total(jmax + 1, 0.0);
                for (std::size_t j = 0; j <= jmax; ++j) total[j] = minus.pmf[j] + plus.pmf[j];
                add_column(t, "minus", minus.pmf);
                add_column(t, "plus", plus.pmf);
                add_column(t, "total", total);
                t.law += " (spectral)";
            }
            return;
        }
        const auto gf = walk1d::hitting_two_sided(w, x, a, b, jmax);
        add_column(t, "minus", coefficients(gf.minus, jmax));
        add_column(t, "plus", coefficients(gf.plus, jmax));
        add_column(t, "total", coefficients(gf.total, jmax));
    };

    if (lv.size() == 1) {
        const auto law = walk1d::hitting_pmf_one_sided(w, x, lv[0], jmax);
        t.law = "one-sided a=" + std::to_string(lv[0]);
        add_column(t, "probability", law.pmf);
        t.defect = value_json(law.defect);
    } else if (lv.size() == 2) {
        const Site a = lv[0], b = lv[1];
        if (x > a && x < b) {
            two_sided(a, b);
        } else if (x == a || x == b) {
            const auto g = walk1d::boundary_hitting_gfs(w, a, b, std::nullopt, jmax);
            t.law = "boundary start on [" + std::to_string(a) + "," + std::to_string(b) + "]";
            add_column(t, "minus", coefficients(x == a ? g.a_return : g.b_to_a, jmax));
            add_column(t, "plus", coefficients(x == a ? g.a_to_b : g.b_return, jmax));
        } else {
            throw DomainError("two levels need a <= from <= b; use one level outside the interval");
        }
    } else if (lv.size() == 3) {
        const Site a = lv[0], b = lv[1], c = lv[2];
        if (x == b) {
            const auto g = walk1d::boundary_hitting_gfs(w, a, b, std::optional<Site>(c), jmax);
            t.law = "return to b before a and c";
            add_column(t, "probability", coefficients(*g.b_return_between, jmax));
        } else if (x > a && x < b) {
            two_sided(a, b);
        } else if (x > b && x < c) {
            two_sided(b, c);
        } else {
            throw DomainError("three levels need a < from < c");
        }
    } else {
        throw UsageError("--levels takes one, two or three sites");
    }
    return t;
}

void emit_hitting(const HittingRequest& r, const HittingTable& t, bool exact, std::ostream& out) {
    if (r.format == "csv") {
        out << 'j';
        for (const auto& n : t.names) out << ',' << n;
        out << '\n';
        for (std::size_t j = 0; j < r.max_j; ++j) {
            out << j + 1;
            for (const auto& col : t.text) out << ',' << col[j];
            out << '\n';
        }
        return;
    }
    json j;
    j["p"] = r.p;
    j["from"] = r.from;
    j["levels"] = r.levels;
    j["max_j"] = r.max_j;
    j["spectral"] = r.spectral;
    j["field"] = exact ? "exact" : "float";
    j["law"] = t.law;
    json cols = json::object();
    for (std::size_t c = 0; c < t.names.size(); ++c) cols[t.names[c]] = t.columns[c];
    j["pmf"] = cols;
    if (t.defect) j["defect"] = *t.defect;
    out << j.dump(2) << '\n';
}

void check_format(const std::string& f) {
    if (f != "csv" && f != "json") throw UsageError("unknown format '" + f + "' (expected csv or json)");
}

// Writes to --out PATH when given, else to `out`.
template <typename Fn>
void with_sink(const std::string& path, std::ostream& out, Fn&& fn) {
    if (path.empty()) {
        fn(out);
        return;
    }
    std::ofstream file(path);
    if (!file) throw UsageError("cannot open '" + path + "' for writing");
    fn(file);
}

}  // namespace

bool is_exact(const std::string& p) { return p.find('/') != std::string::npos; }

std::vector<Site> parse_sites(const std::string& text) {
    std::vector<Site> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &pos);
        } catch (const std::exception&) {
            throw UsageError("cannot parse site list '" + text + "'");
        }
        if (pos != item.size()) throw UsageError("cannot parse site list '" + text + "'");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError("empty site list");
    return out;
}

json to_json(const Scenario& s) {
    return json{{"model", s.model},   {"p", s.p},         {"receptors", s.receptors}, {"starts", s.starts},
                {"n", s.n},           {"N", s.period},    {"method", s.method},       {"order", s.order},
                {"samples", s.samples}, {"seed", s.seed}, {"format", s.format}};
}

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) throw DomainError("scenario must be a JSON object");
    Scenario s;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "model") s.model = value.get<std::string>();
            else if (key == "p") s.p = value.is_string() ? value.get<std::string>() : value.dump();
            else if (key == "receptors") s.receptors = value.get<std::vector<Site>>();
            else if (key == "starts") s.starts = value.get<std::vector<Site>>();
            else if (key == "n") s.n = value.get<std::size_t>();
            else if (key == "N") s.period = value.get<std::int64_t>();
            else if (key == "method") s.method = value.get<std::string>();
            else if (key == "order") s.order = value.get<std::size_t>();
            else if (key == "samples") s.samples = value.get<std::uint64_t>();
            else if (key == "seed") s.seed = value.get<std::uint64_t>();
            else if (key == "format") s.format = value.get<std::string>();
            else throw DomainError("unknown scenario key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw DomainError(std::string("bad scenario value: ") + e.what());
    }
    return s;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sojourn times of random walks on a membrane with receptors", "membrane_sojourn"};
    app.require_subcommand(1);

    // dist and moments share the scenario flags.
    struct Flags {
        std::string scenario_file, model, p, receptors, starts, method, format, out_path;
        std::size_t n = 0, order = 0;
        std::int64_t period = 0;
        std::uint64_t samples = 0, seed = 0;
    };
    Flags df, mf;
    std::vector<std::pair<CLI::App*, Flags*>> scenario_cmds;
    std::map<CLI::App*, std::map<std::string, CLI::Option*>> opts;

    auto add_scenario_flags = [&](CLI::App* cmd, Flags& f) {
        auto& o = opts[cmd];
        o["scenario"] = cmd->add_option("--scenario", f.scenario_file, "JSON scenario file; flags override it");
        o["model"] = cmd->add_option("--model", f.model, "line or torus");
        o["p"] = cmd->add_option("--p", f.p, "step-up probability: num/den (exact) or decimal (float)");
        o["receptors"] = cmd->add_option("--receptors", f.receptors, "receptor sites a1,a2,...");
        o["starts"] = cmd->add_option("--starts", f.starts, "walker starts x1,x2,...");
        o["n"] = cmd->add_option("--n", f.n, "horizon");
        o["N"] = cmd->add_option("--N", f.period, "torus period");
        o["method"] = cmd->add_option("--method", f.method, "gf, dp, mc, qconv or closed");
        o["order"] = cmd->add_option("--order", f.order, "truncation order of the gf route");
        o["samples"] = cmd->add_option("--samples", f.samples, "Monte Carlo samples");
        o["seed"] = cmd->add_option("--seed", f.seed, "Monte Carlo seed");
        o["format"] = cmd->add_option("--format", f.format, "csv or json");
        cmd->add_option("--out", f.out_path, "write the report to PATH");
        scenario_cmds.emplace_back(cmd, &f);
    };

    auto* dist = app.add_subcommand("dist", "distribution of the sojourn time T_n");
    add_scenario_flags(dist, df);
    auto* moments = app.add_subcommand("moments", "mean, second moment and variance of T_n");
    add_scenario_flags(moments, mf);

    HittingRequest hr;
    std::string levels_text, hit_out;
    auto* hitting = app.add_subcommand("hitting", "hitting-time laws of one walker");
    hitting->add_option("--p", hr.p, "step-up probability")->required();
    hitting->add_option("--from", hr.from, "start site")->required();
    hitting->add_option("--levels", levels_text, "a[,b[,c]]")->required();
    hitting->add_option("--max-j", hr.max_j, "largest step count")->required();
    hitting->add_flag("--spectral", hr.spectral, "partial-fraction route (float field)");
    hitting->add_option("--format", hr.format, "csv or json");
    hitting->add_option("--out", hit_out, "write the report to PATH");

    std::string preset = "desk";
    std::uint64_t v_samples = 0, v_seed = 0;
    auto* verify_cmd = app.add_subcommand("verify", "cross-method acceptance suite");
    verify_cmd->add_option("--preset", preset, "desk or quick");
    auto* v_samples_opt = verify_cmd->add_option("--samples", v_samples, "Monte Carlo samples per configuration");
    auto* v_seed_opt = verify_cmd->add_option("--seed", v_seed, "Monte Carlo base seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == static_cast<int>(CLI::ExitCodes::Success) ? kExitOk : kExitUsage;
    }

    try {
        for (auto [cmd, f] : scenario_cmds) {
            if (!cmd->parsed()) continue;
            Scenario s;
            if (cmd == moments) s.method = "dp";
            if (!f->scenario_file.empty()) {
                std::ifstream in(f->scenario_file);
                if (!in) throw UsageError("cannot read scenario file '" + f->scenario_file + "'");
                json j;
                try {
                    in >> j;
                } catch (const json::exception& e) {
                    throw UsageError(std::string("scenario file is not JSON: ") + e.what());
                }
                const Scenario base = s;
                s = scenario_from_json(j);
                if (cmd == moments && !j.contains("method")) s.method = base.method;
            }
            const auto& o = opts[cmd];
            auto given = [&](const char* name) { return o.at(name)->count() > 0; };
            if (given("model")) s.model = f->model;
            if (given("p")) s.p = f->p;
            if (given("receptors")) s.receptors = parse_sites(f->receptors);
            if (given("starts")) s.starts = parse_sites(f->starts);
            if (given("n")) s.n = f->n;
            if (given("N")) s.period = f->period;
            if (given("method")) s.method = f->method;
            if (given("order")) s.order = f->order;
            if (given("samples")) s.samples = f->samples;
            if (given("seed")) s.seed = f->seed;
            if (given("format")) s.format = f->format;
            check_format(s.format);
            if (s.model == "torus" && !given("N") && f->scenario_file.empty())
                throw UsageError("--model torus needs --N");

            with_sink(f->out_path, out, [&](std::ostream& sink) {
                const bool exact = is_exact(s.p);
                if (cmd == dist) {
                    exact ? run_dist<Rational>(s, sink) : run_dist<double>(s, sink);
                } else {
                    exact ? run_moments<Rational>(s, sink) : run_moments<double>(s, sink);
                }
            });
            return kExitOk;
        }

        if (hitting->parsed()) {
            hr.levels = parse_sites(levels_text);
            check_format(hr.format);
            if (hr.max_j < 1) throw DomainError("--max-j must be at least 1");
            // The spectral route is numeric, so an exact p is rounded once.
            const bool exact = is_exact(hr.p) && !hr.spectral;
            if (is_exact(hr.p) && hr.spectral) hr.p = format_value(to_double(parse_exact(hr.p)));
            const auto table = exact ? hitting_table<Rational>(hr) : hitting_table<double>(hr);
            with_sink(hit_out, out, [&](std::ostream& sink) { emit_hitting(hr, table, exact, sink); });
            return kExitOk;
        }

        if (verify_cmd->parsed()) {
            auto opt = verify::preset_options(preset);
            if (v_samples_opt->count() > 0) opt.mc_samples = v_samples;
            if (v_seed_opt->count() > 0) opt.seed = v_seed;
            const auto results = verify::run_acceptance(opt, &out);
            const auto passed = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.pass; });
            out << passed << '/' << results.size() << " criteria passed\n";
            return passed == static_cast<long>(results.size()) ? kExitOk : kExitVerify;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kExitDomain;
    }
    return kExitUsage;
}

}  // namespace membrane::cli
