#include "fkdet/jobs.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "fkdet/dynamics.hpp"
#include "fkdet/entropy_core.hpp"
#include "fkdet/inversion.hpp"
#include "fkdet/mahler_oracle.hpp"
#include "fkdet/poly_trace.hpp"

namespace fkdet {

using Json = nlohmann::ordered_json;

std::string_view to_string(Subcommand s) noexcept {
    switch (s) {
        case Subcommand::Entropy: return "entropy";
        case Subcommand::Fixcount: return "fixcount";
        case Subcommand::Invert: return "invert";
        case Subcommand::Mahler: return "mahler";
        case Subcommand::Specdemo: return "specdemo";
        case Subcommand::Decay: return "decay";
    }
    return "entropy";
}

std::optional<Subcommand> parse_subcommand(std::string_view name) {
    for (auto s : {Subcommand::Entropy, Subcommand::Fixcount, Subcommand::Invert, Subcommand::Mahler,
                   Subcommand::Specdemo, Subcommand::Decay}) {
        if (name == to_string(s)) return s;
    }
    return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string short_fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

// log of a positive big integer without overflow
double log_integer(const Integer& n) {
    if (sgn(n) <= 0) return -std::numeric_limits<double>::infinity();
    long exp = 0;
    const double mant = mpz_get_d_2exp(&exp, n.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

Json element_json(const GroupElement& g) { return Json(g.coords); }

Json moduli_json(const std::vector<std::int64_t>& m) { return Json(m); }

Json number(double v) {
    // JSON has no infinities; null marks them
    if (!std::isfinite(v)) return Json(nullptr);
    return Json(v);
}

Json element_terms(const RealElement& h) {
    Json out = Json::array();
    for (const auto& [g, c] : h.coefficients()) out.push_back(Json{{"element", element_json(g)}, {"coeff", c}});
    return out;
}

Json certificate_json(const InvertibilityCertificate& cert, bool emit_inverse) {
    Json j;
    j["verdict"] = std::string(to_string(cert.verdict));
    j["method"] = cert.method;
    j["residual"] = number(cert.residual);
    j["tail_bound"] = number(cert.tail_bound);
    j["support_radius"] = cert.support_radius;
    j["inverse_support_size"] = cert.approx_inverse ? cert.approx_inverse->support_size() : 0;
    if (cert.witness_quotient) {
        j["witness"] = Json{{"level", cert.witness_level ? Json(*cert.witness_level) : Json(nullptr)},
                            {"moduli", moduli_json(cert.witness_quotient->moduli())},
                            {"order", cert.witness_quotient->order()}};
    }
    Json hist = Json::array();
    for (const auto& s : cert.history) {
        hist.push_back(Json{{"kind", s.kind},
                            {"radius", s.radius},
                            {"residual", number(s.residual)},
                            {"truncation_slack", number(s.truncation_slack)}});
    }
    j["history"] = std::move(hist);
    j["notes"] = cert.notes;
    if (emit_inverse && cert.approx_inverse) j["inverse"] = element_terms(*cert.approx_inverse);
    return j;
}

Json bracket_json(const EntropyBracket& b) {
    Json j;
    j["lower"] = number(b.lower);
    j["upper"] = number(b.upper);
    Json up = Json::array(), lo = Json::array();
    for (double v : b.upper_sequence) up.push_back(number(v));
    for (double v : b.lower_sequence) lo.push_back(number(v));
    j["upper_sequence"] = std::move(up);
    j["lower_sequence"] = std::move(lo);
    return j;
}

Json header(Subcommand cmd, const JobConfig& cfg) {
    Json j;
    j["subcommand"] = std::string(to_string(cmd));
    j["group"] = cfg.group.to_string();
    j["f"] = to_string(cfg.f);
    Json terms = Json::array();
    for (const auto& [g, c] : cfg.f.coefficients()) terms.push_back(Json{{"element", element_json(g)}, {"coeff", c.get_str()}});
    j["f_terms"] = std::move(terms);
    return j;
}

InversionOptions inversion_options(const JobConfig& cfg) {
    InversionOptions o;
    if (cfg.invert.max_radius) o.max_radius = cfg.invert.max_radius;
    return o;
}

struct Outcome {
    Json report;
    Json meta_rows = Json::array();
    std::vector<CsvRow> table;
    bool tabular = false;
    int exit_status = kExitOk;
    std::string summary;
};

// Shared by entropy and invert: track one, then track two on the chain.
struct Certification {
    InvertibilityCertificate cert;
    std::optional<InvertibilityCertificate> witness;
    Verdict verdict = Verdict::Unknown;
};

Certification certify(const JobConfig& cfg) {
    Certification c;
    c.cert = certify_invertible(cfg.f, cfg.tolerances.residual, inversion_options(cfg));
    c.verdict = c.cert.verdict;
    if (c.verdict != Verdict::InvertibleCertified && !cfg.chain.empty()) {
        auto w = detect_noninvertible(cfg.f, cfg.quotient_chain());
        if (w.verdict == Verdict::NonInvertibleCertified) c.verdict = w.verdict;
        c.witness = std::move(w);
    }
    return c;
}

void add_row(Outcome& out, Json row, const std::string& level_order, double value, double bar, double wall_ms,
             const std::string& value_text = {}) {
    const std::string method = row["method"].get<std::string>();
    out.meta_rows.push_back(Json{{"method", method}, {"level_order", level_order}, {"wall_ms", wall_ms}});
    out.table.push_back(CsvRow{level_order, method, value_text.empty() ? fmt(value) : value_text, bar, wall_ms});
    out.report["rows"].push_back(std::move(row));
}

Json level_row(EntropyMethod m, std::size_t level, const FiniteQuotient& q) {
    return Json{{"method", std::string(to_string(m))},
                {"level", level},
                {"order", q.order()},
                {"moduli", moduli_json(q.moduli())}};
}

void exact_rows(Outcome& out, const JobConfig& cfg, const QuotientChain& chain) {
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const auto& q = chain[i];
        if (q.order() > cfg.exact_order_cap) {
            out.report["notes"].push_back("exact: level " + std::to_string(i) + " of order " + std::to_string(q.order()) +
                                          " exceeds the exact cap; use method dense");
            continue;
        }
        const auto t0 = Clock::now();
        const auto fp = fixed_points_exact(cfg.f, q, cfg.exact_order_cap);
        const double wall = ms_since(t0);
        Json row = level_row(EntropyMethod::Exact, i, q);
        double value = std::numeric_limits<double>::quiet_NaN();
        if (fp.count) {
            value = log_integer(*fp.count) / static_cast<double>(q.order());
            row["fixed_points"] = fp.count->get_str();
        } else {
            row["fixed_points"] = nullptr;
        }
        row["value"] = number(value);
        row["error_bar"] = 0.0;
        row["flagged"] = !fp.count || sgn(*fp.count) == 0;
        add_row(out, std::move(row), std::to_string(q.order()), value, 0.0, wall);
    }
}

void dense_rows(Outcome& out, const JobConfig& cfg, const QuotientChain& chain, const InvertibilityCertificate& cert,
                unsigned threads) {
    ConvergeOptions co;
    co.cauchy_tol = cfg.tolerances.cauchy;
    co.dense_cap = cfg.dense_cap;
    co.threads = threads;
    co.certificate = cert;
    if (cfg.wants(EntropyMethod::Exact)) co.exact_order_cap = cfg.exact_order_cap;
    const auto rep = entropy_converge(cfg.f, chain, co);
    for (const auto& r : rep.rows) {
        Json row = level_row(EntropyMethod::Dense, r.level, chain[r.level]);
        row["value"] = number(r.value);
        row["error_bar"] = r.error_bar;
        if (r.fixed_points) row["fixed_points"] = r.fixed_points->get_str();
        row["flagged"] = r.flagged;
        add_row(out, std::move(row), std::to_string(r.order), r.value, r.error_bar, r.wall_ms);
    }
    out.report["dense"] = Json{{"estimate", number(rep.estimate)},
                               {"cauchy_fired", rep.cauchy_fired},
                               {"final_gap", number(rep.final_gap)},
                               {"monotone", rep.monotone},
                               {"advisory", rep.advisory}};
    if (rep.bracket) out.report["bracket"] = bracket_json(*rep.bracket);
    for (const auto& n : rep.notes) out.report["notes"].push_back("dense: " + n);
}

Json cheb_fields(const ChebEstimate& e, bool target_met) {
    return Json{{"degree", e.degree},
                {"sup_error", number(e.sup_error)},
                {"truncation_term", number(e.truncation_term)},
                {"target_met", target_met}};
}

void cheb_rows(Outcome& out, const JobConfig& cfg, const QuotientChain& chain, const InvertibilityCertificate& cert) {
    const RealElement fr = convert<double>(cfg.f);
    const auto interval = spectral_interval_for_factor(fr, cert);
    out.report["spectral_interval"] = Json{{"a", interval.a},
                                           {"b", interval.b},
                                           {"inverse_norm_bound", interval.inverse_norm_bound},
                                           {"point", interval.point}};
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const auto t0 = Clock::now();
        const auto res = entropy_cheb_adaptive(fr, chain[i], interval, cfg.tolerances.cheb_bar, cfg.cheb.start_degree,
                                               cfg.cheb.max_degree);
        const double wall = ms_since(t0);
        Json row = level_row(EntropyMethod::Cheb, i, chain[i]);
        row["value"] = number(res.estimate.value);
        row["error_bar"] = number(res.estimate.error_bar);
        row.update(cheb_fields(res.estimate, res.target_met));
        row["flagged"] = !res.target_met;
        add_row(out, std::move(row), std::to_string(chain[i].order()), res.estimate.value, res.estimate.error_bar, wall);
    }
    if (cfg.cheb.radius) {
        const auto t0 = Clock::now();
        const auto res = entropy_cheb_adaptive(fr, *cfg.cheb.radius, interval, cfg.tolerances.cheb_bar,
                                               cfg.cheb.start_degree, cfg.cheb.max_degree);
        const double wall = ms_since(t0);
        Json row{{"method", "cheb"}, {"level", nullptr}, {"order", nullptr}, {"radius", *cfg.cheb.radius}};
        row["value"] = number(res.estimate.value);
        row["error_bar"] = number(res.estimate.error_bar);
        row.update(cheb_fields(res.estimate, res.target_met));
        row["flagged"] = !res.target_met;
        add_row(out, std::move(row), "inf", res.estimate.value, res.estimate.error_bar, wall);
    }
}

Json wiener_json(const WienerResult& w) {
    return Json{{"verdict", std::string(to_string(w.verdict))},
                {"grid", w.grid},
                {"grid_min", number(w.grid_min)},
                {"argmin", w.argmin},
                {"certified_lower", number(w.certified_lower)}};
}

void mahler_row(Outcome& out, const JobConfig& cfg, unsigned threads) {
    const TorusPolynomial p(cfg.f);
    const auto t0 = Clock::now();
    try {
        const auto m = mahler_quadrature(p, cfg.mahler_grid, threads);
        const double wall = ms_since(t0);
        Json row{{"method", "mahler"}, {"level", nullptr}, {"order", nullptr}, {"grid", m.grid}};
        row["value"] = number(m.value);
        row["error_bar"] = number(m.error_estimate);
        row["value_fine"] = number(m.value_fine);
        row["wiener"] = wiener_json(m.wiener);
        row["flagged"] = false;
        add_row(out, std::move(row), "inf", m.value, m.error_estimate, wall);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::Precondition) throw;
        out.report["notes"].push_back(std::string("mahler: ") + e.what());
    }
}

Outcome entropy_job(const JobConfig& cfg, const JobOptions& opt) {
    Outcome out;
    out.tabular = true;
    out.report["chain"] = Json::array();
    for (const auto& m : cfg.chain) out.report["chain"].push_back(moduli_json(m));
    Json methods = Json::array();
    for (auto m : cfg.methods) methods.push_back(std::string(to_string(m)));
    out.report["methods"] = std::move(methods);
    out.report["rows"] = Json::array();
    out.report["notes"] = Json::array();

    const QuotientChain chain = cfg.quotient_chain();
    const auto c = certify(cfg);
    out.report["verdict"] = std::string(to_string(c.verdict));
    out.report["certificate"] = certificate_json(c.cert, false);

    if (c.verdict == Verdict::NonInvertibleCertified) {
        out.report["witness"] = certificate_json(*c.witness, false);
        out.exit_status = kExitNonexpansive;
        const auto& w = *c.witness;
        out.summary = "entropy: f is not invertible in L^1; singular quotient at level " +
                      std::to_string(w.witness_level.value_or(0)) + " (order " +
                      std::to_string(w.witness_quotient ? w.witness_quotient->order() : 0) + "); action nonexpansive";
        return out;
    }

    if (c.verdict == Verdict::Unknown) {
        // only fixed-point counting: without a certificate the level values say nothing about h
        out.report["advisory"] = true;
        out.report["notes"].push_back("ADVISORY: invertibility of f is undecided; only fixed-point counts are reported");
        if (c.witness) out.report["noninvertibility_search"] = certificate_json(*c.witness, false);
        exact_rows(out, cfg, chain);
        if (cfg.wants(EntropyMethod::Dense)) dense_rows(out, cfg, chain, c.cert, opt.threads);
        out.exit_status = kExitUnknown;
        out.summary = "entropy: ADVISORY invertibility unknown; " + std::to_string(out.table.size()) +
                      " fixed-point rows written";
        return out;
    }

    out.report["advisory"] = false;
    if (cfg.wants(EntropyMethod::Exact)) exact_rows(out, cfg, chain);
    if (cfg.wants(EntropyMethod::Dense)) {
        dense_rows(out, cfg, chain, c.cert, opt.threads);
    } else {
        out.report["bracket"] = bracket_json(entropy_bounds(convert<double>(cfg.f), c.cert));
    }
    if (cfg.wants(EntropyMethod::Cheb)) cheb_rows(out, cfg, chain, c.cert);
    if (cfg.wants(EntropyMethod::Mahler)) mahler_row(out, cfg, opt.threads);

    std::ostringstream s;
    s << "entropy: invertible-certified (residual " << short_fmt(c.cert.residual) << "); ";
    const auto& rows = out.report["rows"];
    if (!rows.empty()) {
        const auto& last = rows.back();
        s << rows.size() << " rows, last " << last["method"].get<std::string>() << " value ";
        s << (last["value"].is_null() ? std::string("null") : short_fmt(last["value"].get<double>()));
    } else {
        s << "no rows";
    }
    s << "; bracket [" << short_fmt(out.report["bracket"]["lower"].get<double>()) << ", "
      << short_fmt(out.report["bracket"]["upper"].get<double>()) << "]";
    out.summary = s.str();
    return out;
}

Outcome fixcount_job(const JobConfig& cfg) {
    Outcome out;
    out.tabular = true;
    out.report["rows"] = Json::array();
    std::string last;
    for (const auto& q : cfg.fixcount_levels()) {
        const auto t0 = Clock::now();
        const auto fp = fixed_points_exact(cfg.f, q, cfg.exact_order_cap);
        Json row{{"method", "exact"}, {"order", q.order()}, {"moduli", moduli_json(q.moduli())}};
        row["fixed_points"] = fp.count ? Json(fp.count->get_str()) : Json(nullptr);
        if (fp.count && cfg.enumerate_cap > 0 && *fp.count <= cfg.enumerate_cap && sgn(*fp.count) > 0) {
            const auto g = enumerate_fixed_points(cfg.f, q, cfg.enumerate_cap);
            Json pts = Json::array();
            for (std::size_t i = 0; i < g.points.size(); ++i) pts.push_back(rational_strings(g.point(i)));
            row["points"] = std::move(pts);
            row["separation_holds"] = g.separation_holds;
            if (g.min_separation) row["min_separation"] = g.min_separation->get_str() + "/" + g.denominator.get_str();
        }
        const double wall = ms_since(t0);
        last = fp.count ? fp.count->get_str() : "infinite";
        add_row(out, std::move(row), std::to_string(q.order()), 0.0, 0.0, wall, fp.count ? last : "inf");
    }
    out.summary = "fixcount: " + std::to_string(out.table.size()) + " levels, last |Fix| = " + last;
    return out;
}

Outcome invert_job(const JobConfig& cfg) {
    Outcome out;
    const auto c = certify(cfg);
    out.report["verdict"] = std::string(to_string(c.verdict));
    out.report["certificate"] = certificate_json(c.cert, cfg.invert.emit_inverse);
    if (c.witness) out.report["witness"] = certificate_json(*c.witness, false);
    std::ostringstream s;
    s << "invert: " << to_string(c.verdict);
    if (c.verdict == Verdict::InvertibleCertified) {
        s << " residual " << short_fmt(c.cert.residual) << " tail " << short_fmt(c.cert.tail_bound) << " radius "
          << c.cert.support_radius;
    } else if (c.verdict == Verdict::NonInvertibleCertified && c.witness && c.witness->witness_quotient) {
        s << " singular quotient of order " << c.witness->witness_quotient->order();
    }
    out.summary = s.str();
    out.exit_status = c.verdict == Verdict::InvertibleCertified      ? kExitOk
                      : c.verdict == Verdict::NonInvertibleCertified ? kExitNonexpansive
                                                                     : kExitUnknown;
    return out;
}

Outcome mahler_job(const JobConfig& cfg, const JobOptions& opt) {
    if (cfg.group.kind() != GroupKind::FreeAbelian || cfg.group.rank() > 3) {
        throw Error(ErrorCode::Parameter, "mahler needs a free abelian group of rank at most 3");
    }
    Outcome out;
    out.tabular = true;
    out.report["rows"] = Json::array();
    const TorusPolynomial p(cfg.f);
    const auto w = wiener_invertibility(p, cfg.mahler_grid, opt.threads);
    out.report["wiener"] = wiener_json(w);
    if (w.verdict == WienerVerdict::NonvanishingCertified) {
        out.report["notes"] = Json::array();
        mahler_row(out, cfg, opt.threads);
        const auto& row = out.report["rows"].back();
        out.summary = "mahler: m(f) = " + fmt(row["value"].get<double>()) + " (grid " +
                      std::to_string(cfg.mahler_grid) + ", doubling estimate " +
                      short_fmt(row["error_bar"].get<double>()) + ")";
    } else if (w.verdict == WienerVerdict::GridVanishing) {
        out.exit_status = kExitNonexpansive;
        out.summary = "mahler: f-hat vanishes on the grid; f is not invertible";
    } else {
        out.exit_status = kExitUnknown;
        out.summary = "mahler: nonvanishing not certified at grid " + std::to_string(cfg.mahler_grid);
    }
    return out;
}

TorusPoint make_point(const PointSpec& spec, const JobConfig& cfg, const L1Inverse& inv) {
    switch (spec.kind) {
        case PointSpec::Kind::Zero: {
            const WordBall ball = word_ball(cfg.group, spec.radius);
            return TorusPoint::zero(cfg.group, ball.elements());
        }
        case PointSpec::Kind::Homoclinic: return homoclinic_point(inv, spec.radius);
        case PointSpec::Kind::Periodic: {
            const FiniteQuotient q = spec.moduli.size() == 1 ? FiniteQuotient::congruence(cfg.group, spec.moduli[0])
                                                             : FiniteQuotient(cfg.group, spec.moduli);
            const auto g = enumerate_fixed_points(cfg.f, q);
            if (!g.enumerated || spec.index >= g.points.size()) {
                throw Error(ErrorCode::Parameter, "periodic point index " + std::to_string(spec.index) +
                                                      " not available (" + std::to_string(g.points.size()) +
                                                      " points enumerated)");
            }
            return g.point(spec.index);
        }
    }
    throw Error(ErrorCode::Internal, "unhandled point kind");
}

Outcome specdemo_job(const JobConfig& cfg) {
    if (!cfg.specdemo) throw Error(ErrorCode::Parse, "config field specdemo: missing");
    const auto& sd = *cfg.specdemo;
    const RealElement fr = convert<double>(cfg.f);
    const auto inv = l1_inverse(fr, sd.tail);
    const auto x1 = make_point(sd.x1, cfg, inv);
    const auto x2 = make_point(sd.x2, cfg, inv);
    const auto glue = specification_glue(x1, x2, sd.c1, sd.c2, sd.epsilon, cfg.f, sd.tail);
    const double residual = membership_residual(glue.y, fr);

    Outcome out;
    out.report["epsilon"] = sd.epsilon;
    Json wf = Json::array();
    for (const auto& g : glue.window_f) wf.push_back(element_json(g));
    out.report["window_f"] = std::move(wf);
    out.report["max_distance_1"] = glue.max_distance_1;
    out.report["max_distance_2"] = glue.max_distance_2;
    out.report["left_windows_disjoint"] = glue.left_windows_disjoint;
    out.report["membership_residual"] = residual;
    Json y = Json::array();
    std::set<GroupElement> coords(sd.c1.begin(), sd.c1.end());
    coords.insert(sd.c2.begin(), sd.c2.end());
    for (const auto& g : coords) y.push_back(Json{{"element", element_json(g)}, {"value", glue.y.at(g)}});
    out.report["y"] = std::move(y);
    out.summary = "specdemo: glued at epsilon " + short_fmt(sd.epsilon) + ", distances " +
                  short_fmt(glue.max_distance_1) + " / " + short_fmt(glue.max_distance_2) + ", residual " +
                  short_fmt(residual);
    return out;
}

Outcome decay_job(const JobConfig& cfg) {
    const RealElement fr = convert<double>(cfg.f);
    InversionOptions io = inversion_options(cfg);
    if (cfg.decay.radius) io.max_radius = cfg.decay.radius;
    const auto inv = l1_inverse(fr, cfg.decay.tail, io);
    const auto prof = decay_profile(inv.inverse, 2 * inv.tail_bound);
    Outcome out;
    out.report["radius"] = inv.radius;
    out.report["tail_bound"] = inv.tail_bound;
    out.report["residual"] = inv.residual;
    out.report["radii"] = prof.radii;
    Json shells = Json::array();
    for (double v : prof.shell_max) shells.push_back(number(v));
    out.report["shell_max"] = std::move(shells);
    out.report["rate"] = prof.rate;
    out.report["ratio"] = std::exp(prof.rate);
    out.report["intercept"] = prof.intercept;
    out.report["fit_residual"] = prof.fit_residual;
    out.report["fitted_shells"] = prof.fitted_shells;
    out.summary = "decay: rate " + short_fmt(prof.rate) + " (ratio " + short_fmt(std::exp(prof.rate)) + ") over " +
                  std::to_string(prof.fitted_shells) + " shells";
    return out;
}

}  // namespace

JobResult run_job(Subcommand command, const JobConfig& config, const JobOptions& options) {
    const auto t0 = Clock::now();
    Outcome out;
    switch (command) {
        case Subcommand::Entropy: out = entropy_job(config, options); break;
        case Subcommand::Fixcount: out = fixcount_job(config); break;
        case Subcommand::Invert: out = invert_job(config); break;
        case Subcommand::Mahler: out = mahler_job(config, options); break;
        case Subcommand::Specdemo: out = specdemo_job(config); break;
        case Subcommand::Decay: out = decay_job(config); break;
    }
    Json report = header(command, config);
    report.update(out.report);
    report["exit_status"] = out.exit_status;

    Json meta;
    meta["subcommand"] = std::string(to_string(command));
    meta["threads"] = options.threads;
    meta["seed"] = options.seed;
    meta["wall_ms_total"] = ms_since(t0);
    meta["rows"] = std::move(out.meta_rows);

    JobResult r;
    r.exit_status = out.exit_status;
    r.summary = std::move(out.summary);
    r.report = report.dump(2) + "\n";
    r.meta = meta.dump(2) + "\n";
    r.table = std::move(out.table);
    r.tabular = out.tabular;
    return r;
}

std::string to_csv(const std::vector<CsvRow>& rows) {
    std::ostringstream os;
    os << "level_order,method,value,error_bar,wall_ms\n";
    for (const auto& r : rows) {
        os << r.level_order << ',' << r.method << ',' << r.value << ',' << fmt(r.error_bar) << ','
           << std::fixed << std::setprecision(3) << r.wall_ms << std::defaultfloat << '\n';
    }
    return os.str();
}

namespace {

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Parameter, "cannot write " + path);
    out << text;
    if (!out) throw Error(ErrorCode::Parameter, "write failed for " + path);
}

}  // namespace

std::vector<std::string> write_outputs(const JobResult& result, OutputFormat format, const std::string& path) {
    std::vector<std::string> written;
    if (format == OutputFormat::Csv) {
        if (!result.tabular) {
            throw Error(ErrorCode::Parameter, "csv output is available for entropy, fixcount and mahler only");
        }
        write_file(path, to_csv(result.table));
        write_file(path + ".json", result.report);
        written = {path, path + ".json"};
    } else {
        write_file(path, result.report);
        written = {path};
    }
    write_file(path + ".meta.json", result.meta);
    written.push_back(path + ".meta.json");
    return written;
}

}  // namespace fkdet
