#include "fkdet/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace fkdet {

using nlohmann::json;

std::string_view to_string(OutputFormat f) noexcept { return f == OutputFormat::Json ? "json" : "csv"; }

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::Parse, "config field " + path + ": " + what);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            fail(path.empty() ? key : path + "." + key, "unknown key");
        }
    }
}

std::int64_t get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<std::int64_t>();
}

std::int64_t get_positive(const json& j, const std::string& path) {
    const auto v = get_int(j, path);
    if (v <= 0) fail(path, "expected a positive integer");
    return v;
}

double get_positive_double(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!(v > 0.0)) fail(path, "expected a positive number");
    return v;
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

GroupDescriptor parse_group(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("kind")) fail(path, "expected an object with a kind");
    const auto kind = get_string(j["kind"], path + ".kind");
    if (kind == "free_abelian") {
        check_keys(j, path, {"kind", "rank"});
        if (!j.contains("rank")) fail(path + ".rank", "missing");
        return GroupDescriptor::free_abelian(static_cast<int>(get_positive(j["rank"], path + ".rank")));
    }
    if (kind == "heisenberg") {
        check_keys(j, path, {"kind"});
        return GroupDescriptor::heisenberg();
    }
    if (kind == "direct_product") {
        check_keys(j, path, {"kind", "factors"});
        if (!j.contains("factors") || !j["factors"].is_array() || j["factors"].empty()) {
            fail(path + ".factors", "expected a nonempty list");
        }
        std::vector<GroupDescriptor> factors;
        for (std::size_t i = 0; i < j["factors"].size(); ++i) {
            factors.push_back(parse_group(j["factors"][i], path + ".factors[" + std::to_string(i) + "]"));
        }
        return GroupDescriptor::direct_product(std::move(factors));
    }
    if (kind == "finite_cyclic_product") {
        check_keys(j, path, {"kind", "moduli"});
        if (!j.contains("moduli") || !j["moduli"].is_array() || j["moduli"].empty()) {
            fail(path + ".moduli", "expected a nonempty list");
        }
        std::vector<std::int64_t> m;
        for (std::size_t i = 0; i < j["moduli"].size(); ++i) {
            m.push_back(get_positive(j["moduli"][i], path + ".moduli[" + std::to_string(i) + "]"));
        }
        return GroupDescriptor::finite_cyclic_product(std::move(m));
    }
    fail(path + ".kind", "unknown group kind '" + kind + "'");
}

GroupElement parse_word(const GroupDescriptor& group, const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected a list of [generator, exponent] pairs");
    Word word;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        const auto& pair = j[i];
        if (!pair.is_array() || pair.size() != 2) fail(p, "expected [generator, exponent]");
        const auto name = get_string(pair[0], p + "[0]");
        if (!group.generator(name)) fail(p, "undeclared generator '" + name + "' for " + group.to_string());
        word.emplace_back(name, get_int(pair[1], p + "[1]"));
    }
    return evaluate_word(group, word);
}

std::vector<GroupElement> parse_window(const GroupDescriptor& group, const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty list of words");
    std::set<GroupElement> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.insert(parse_word(group, j[i], path + "[" + std::to_string(i) + "]"));
    return {out.begin(), out.end()};
}

std::vector<std::int64_t> parse_level(const GroupDescriptor& group, const json& j, const std::string& path) {
    try {
        if (j.is_number_integer()) return FiniteQuotient::congruence(group, get_positive(j, path)).moduli();
        if (!j.is_array()) fail(path, "expected a modulus or a list of moduli");
        std::vector<std::int64_t> m;
        for (std::size_t i = 0; i < j.size(); ++i) m.push_back(get_positive(j[i], path + "[" + std::to_string(i) + "]"));
        return FiniteQuotient(group, m).moduli();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Parse) throw;
        fail(path, e.what());
    }
}

std::vector<std::vector<std::int64_t>> parse_levels(const GroupDescriptor& group, const json& j,
                                                    const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty list");
    std::vector<std::vector<std::int64_t>> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_level(group, j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

EntropyMethod parse_method(const json& j, const std::string& path) {
    const auto s = get_string(j, path);
    for (auto m : {EntropyMethod::Dense, EntropyMethod::Exact, EntropyMethod::Cheb, EntropyMethod::Mahler}) {
        if (s == to_string(m)) return m;
    }
    fail(path, "unknown method '" + s + "' (dense, exact, cheb, mahler)");
}

PointSpec parse_point(const json& j, const std::string& path) {
    PointSpec p;
    if (!j.is_object() || !j.contains("kind")) fail(path, "expected an object with a kind");
    const auto kind = get_string(j["kind"], path + ".kind");
    if (kind == "zero" || kind == "homoclinic") {
        check_keys(j, path, {"kind", "radius"});
        p.kind = kind == "zero" ? PointSpec::Kind::Zero : PointSpec::Kind::Homoclinic;
        if (j.contains("radius")) p.radius = static_cast<int>(get_positive(j["radius"], path + ".radius"));
    } else if (kind == "periodic") {
        check_keys(j, path, {"kind", "modulus", "index"});
        p.kind = PointSpec::Kind::Periodic;
        if (!j.contains("modulus")) fail(path + ".modulus", "missing");
        const auto& m = j["modulus"];
        if (m.is_array()) {
            for (std::size_t i = 0; i < m.size(); ++i) {
                p.moduli.push_back(get_positive(m[i], path + ".modulus[" + std::to_string(i) + "]"));
            }
        } else {
            p.moduli.push_back(get_positive(m, path + ".modulus"));
        }
        if (j.contains("index")) {
            const auto idx = get_int(j["index"], path + ".index");
            if (idx < 0) fail(path + ".index", "expected a nonnegative integer");
            p.index = static_cast<std::size_t>(idx);
        }
    } else {
        fail(path + ".kind", "unknown point kind '" + kind + "' (zero, homoclinic, periodic)");
    }
    return p;
}

}  // namespace

GroupElement evaluate_word(const GroupDescriptor& group, const Word& word) {
    GroupElement g = group.identity();
    for (const auto& [name, exp] : word) {
        auto gen = group.generator(name);
        if (!gen) throw Error(ErrorCode::Parse, "undeclared generator '" + name + "' for " + group.to_string());
        const GroupElement step = exp >= 0 ? *gen : group.inverse(*gen);
        for (std::int64_t k = 0; k < (exp >= 0 ? exp : -exp); ++k) g = group.multiply(g, step);
    }
    return g;
}

bool JobConfig::wants(EntropyMethod m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }

QuotientChain JobConfig::quotient_chain() const {
    if (chain.empty()) throw Error(ErrorCode::Parse, "config field chain: missing");
    std::vector<FiniteQuotient> levels;
    for (const auto& m : chain) levels.emplace_back(group, m);
    return QuotientChain(std::move(levels));
}

std::vector<FiniteQuotient> JobConfig::fixcount_levels() const {
    const auto& src = moduli.empty() ? chain : moduli;
    if (src.empty()) throw Error(ErrorCode::Parse, "config field moduli: missing (and no chain to fall back on)");
    std::vector<FiniteQuotient> out;
    for (const auto& m : src) out.emplace_back(group, m);
    return out;
}

JobConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Parse, std::string("malformed JSON: ") + e.what());
    }
    check_keys(j, "", {"group", "f", "chain", "moduli", "methods", "tolerances", "cheb", "mahler", "decay", "invert",
                       "fixcount", "specdemo", "limits", "output"});

    JobConfig cfg;
    if (!j.contains("group")) fail("group", "missing");
    cfg.group = parse_group(j["group"], "group");

    if (!j.contains("f")) fail("f", "missing");
    if (!j["f"].is_array() || j["f"].empty()) fail("f", "expected a nonempty list of terms");
    cfg.f = IntElement(cfg.group);
    for (std::size_t i = 0; i < j["f"].size(); ++i) {
        const std::string p = "f[" + std::to_string(i) + "]";
        const auto& term = j["f"][i];
        check_keys(term, p, {"word", "coeff"});
        if (!term.contains("coeff")) fail(p + ".coeff", "missing");
        const auto g = term.contains("word") ? parse_word(cfg.group, term["word"], p + ".word") : cfg.group.identity();
        cfg.f.add_term(g, Integer(static_cast<long>(get_int(term["coeff"], p + ".coeff"))));
    }
    if (cfg.f.is_zero()) fail("f", "terms cancel to zero");

    if (j.contains("chain")) {
        cfg.chain = parse_levels(cfg.group, j["chain"], "chain");
        try {
            (void)cfg.quotient_chain();
        } catch (const Error& e) {
            fail("chain", std::string(e.what()) + " (moduli must be strictly increasing and divisible)");
        }
    }
    if (j.contains("moduli")) cfg.moduli = parse_levels(cfg.group, j["moduli"], "moduli");

    if (j.contains("methods")) {
        if (!j["methods"].is_array() || j["methods"].empty()) fail("methods", "expected a nonempty list");
        cfg.methods.clear();
        for (std::size_t i = 0; i < j["methods"].size(); ++i) {
            auto m = parse_method(j["methods"][i], "methods[" + std::to_string(i) + "]");
            if (!cfg.wants(m)) cfg.methods.push_back(m);
        }
        if (cfg.wants(EntropyMethod::Mahler) &&
            (cfg.group.kind() != GroupKind::FreeAbelian || cfg.group.rank() > 3)) {
            fail("methods", "mahler needs a free abelian group of rank at most 3");
        }
    }

    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        check_keys(t, "tolerances", {"residual", "tail", "cauchy", "cheb_bar"});
        if (t.contains("residual")) cfg.tolerances.residual = get_positive_double(t["residual"], "tolerances.residual");
        if (t.contains("tail")) cfg.tolerances.tail = get_positive_double(t["tail"], "tolerances.tail");
        if (t.contains("cauchy")) cfg.tolerances.cauchy = get_positive_double(t["cauchy"], "tolerances.cauchy");
        if (t.contains("cheb_bar")) cfg.tolerances.cheb_bar = get_positive_double(t["cheb_bar"], "tolerances.cheb_bar");
    }
    if (j.contains("cheb")) {
        const auto& c = j["cheb"];
        check_keys(c, "cheb", {"start_degree", "max_degree", "radius"});
        if (c.contains("start_degree")) cfg.cheb.start_degree = static_cast<int>(get_positive(c["start_degree"], "cheb.start_degree"));
        if (c.contains("max_degree")) cfg.cheb.max_degree = static_cast<int>(get_positive(c["max_degree"], "cheb.max_degree"));
        if (c.contains("radius")) cfg.cheb.radius = static_cast<int>(get_positive(c["radius"], "cheb.radius"));
        if (cfg.cheb.max_degree < cfg.cheb.start_degree) fail("cheb.max_degree", "smaller than start_degree");
    }
    if (j.contains("mahler")) {
        check_keys(j["mahler"], "mahler", {"grid"});
        if (j["mahler"].contains("grid")) cfg.mahler_grid = static_cast<int>(get_positive(j["mahler"]["grid"], "mahler.grid"));
    }
    if (j.contains("decay")) {
        const auto& d = j["decay"];
        check_keys(d, "decay", {"radius", "tail"});
        if (d.contains("radius")) cfg.decay.radius = static_cast<int>(get_positive(d["radius"], "decay.radius"));
        if (d.contains("tail")) cfg.decay.tail = get_positive_double(d["tail"], "decay.tail");
    }
    if (j.contains("invert")) {
        const auto& v = j["invert"];
        check_keys(v, "invert", {"max_radius", "emit_inverse"});
        if (v.contains("max_radius")) cfg.invert.max_radius = static_cast<int>(get_positive(v["max_radius"], "invert.max_radius"));
        if (v.contains("emit_inverse")) {
            if (!v["emit_inverse"].is_boolean()) fail("invert.emit_inverse", "expected a boolean");
            cfg.invert.emit_inverse = v["emit_inverse"].get<bool>();
        }
    }
    if (j.contains("fixcount")) {
        check_keys(j["fixcount"], "fixcount", {"enumerate_cap"});
        if (j["fixcount"].contains("enumerate_cap")) {
            const auto v = get_int(j["fixcount"]["enumerate_cap"], "fixcount.enumerate_cap");
            if (v < 0) fail("fixcount.enumerate_cap", "expected a nonnegative integer");
            cfg.enumerate_cap = static_cast<std::size_t>(v);
        }
    }
    if (j.contains("specdemo")) {
        const auto& s = j["specdemo"];
        check_keys(s, "specdemo", {"epsilon", "tail", "x1", "x2", "c1", "c2"});
        SpecdemoSettings sd;
        if (s.contains("epsilon")) sd.epsilon = get_positive_double(s["epsilon"], "specdemo.epsilon");
        if (s.contains("tail")) sd.tail = get_positive_double(s["tail"], "specdemo.tail");
        for (const char* k : {"x1", "x2", "c1", "c2"}) {
            if (!s.contains(k)) fail(std::string("specdemo.") + k, "missing");
        }
        sd.x1 = parse_point(s["x1"], "specdemo.x1");
        sd.x2 = parse_point(s["x2"], "specdemo.x2");
        sd.c1 = parse_window(cfg.group, s["c1"], "specdemo.c1");
        sd.c2 = parse_window(cfg.group, s["c2"], "specdemo.c2");
        cfg.specdemo = std::move(sd);
    }
    if (j.contains("limits")) {
        const auto& l = j["limits"];
        check_keys(l, "limits", {"dense_cap", "exact_order_cap"});
        if (l.contains("dense_cap")) cfg.dense_cap = static_cast<std::size_t>(get_positive(l["dense_cap"], "limits.dense_cap"));
        if (l.contains("exact_order_cap")) {
            cfg.exact_order_cap = static_cast<std::size_t>(get_positive(l["exact_order_cap"], "limits.exact_order_cap"));
        }
    }
    if (j.contains("output")) {
        const auto& o = j["output"];
        check_keys(o, "output", {"format", "path"});
        if (o.contains("format")) {
            const auto f = get_string(o["format"], "output.format");
            if (f == "json") cfg.format = OutputFormat::Json;
            else if (f == "csv") cfg.format = OutputFormat::Csv;
            else fail("output.format", "expected json or csv");
        }
        if (o.contains("path")) cfg.out_path = get_string(o["path"], "output.path");
    }
    return cfg;
}

JobConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Parse, "cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace fkdet
