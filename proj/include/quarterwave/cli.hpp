#pragma once

// Command-line driver. `run` parses the arguments, dispatches to the
// subcommand and maps failures to exit codes: 0 success, 1 invalid input,
// 2 numerical failure.

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "acceptance.hpp"
#include "errors.hpp"
#include "nystrom.hpp"
#include "potential.hpp"
#include "resolvent.hpp"
#include "sampled_field.hpp"
#include "scattering.hpp"
#include "spectral.hpp"

namespace quarterwave::cli {

inline constexpr const char* schema_version = "quarterwave/1";

using Cell = std::variant<double, long, std::string, bool>;

/// Rows of named columns, written as CSV or as JSON objects.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

inline std::string format_cell(const Cell& c) {
    if (const double* d = std::get_if<double>(&c)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", *d);
        return buf;
    }
    if (const long* l = std::get_if<long>(&c)) return std::to_string(*l);
    if (const bool* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    return std::get<std::string>(c);
}

inline void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
        os << '\n';
    }
}

inline nlohmann::json to_json(const std::string& command, const Table& t) {
    nlohmann::json doc;
    doc["schema"] = schema_version;
    doc["command"] = command;
    auto rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size(); ++i)
            std::visit([&](const auto& v) { obj[t.columns[i]] = v; }, row[i]);
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    return doc;
}

struct Common {
    std::string config;
    std::string out;
    std::string format = "csv";
    int panels = GridOptions{}.panels_per_axis;
    int nodes = GridOptions{}.nodes_per_panel;

    GridOptions grid() const {
        GridOptions g;
        g.panels_per_axis = panels;
        g.nodes_per_panel = nodes;
        return g;
    }
};

inline BoundaryPotential load_potential(const std::string& path) {
    if (path.empty()) throw ValidationError("--config is required");
    std::ifstream is(path);
    if (!is) throw ValidationError("--config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << is.rdbuf();
    try {
        return from_config(buf.str());
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("--config: ") + e.what());
    }
}

/// Writes to --out, or to the given stream when --out is empty or "-".
template <class Writer>
void emit(const Common& c, std::ostream& fallback, Writer&& write) {
    if (c.out.empty() || c.out == "-") {
        write(fallback);
        return;
    }
    std::ofstream os(c.out, std::ios::binary);
    if (!os) throw ValidationError("--out: cannot write '" + c.out + "'");
    write(os);
}

inline void emit_table(const Common& c, const std::string& command, const Table& t, std::ostream& out) {
    emit(c, out, [&](std::ostream& os) {
        if (c.format == "json") os << to_json(command, t).dump(2) << '\n';
        else write_csv(os, t);
    });
}

inline void add_common(CLI::App* sub, Common& c, bool needs_config = true) {
    auto* opt = sub->add_option("--config", c.config, "potential configuration (JSON)");
    if (needs_config) opt->required();
    sub->add_option("--out", c.out, "output path (default: standard output)");
    sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--panels", c.panels, "boundary panels per axis")->check(CLI::Range(1, 4096));
    sub->add_option("--nodes", c.nodes, "Gauss nodes per panel")->check(CLI::Range(2, 64));
}

inline void warn_all(const std::vector<std::string>& warnings, std::ostream& err) {
    for (const auto& w : warnings) err << "warning: " << w << '\n';
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Quarter-plane two-body problem with a Robin boundary potential"};
    app.require_subcommand(1);
    Common common;

    // bound-states
    double kappa_min = 0.01, kappa_max = 3.0;
    int bs_samples = BoundStateOptions{}.samples;
    auto* bs = app.add_subcommand("bound-states", "bound states -kappa^2 from the zeros of 1 + B(i kappa)");
    add_common(bs, common);
    bs->add_option("--kappa-min", kappa_min, "lower end of the kappa range")->check(CLI::PositiveNumber);
    bs->add_option("--kappa-max", kappa_max, "upper end of the kappa range")->check(CLI::PositiveNumber);
    bs->add_option("--samples", bs_samples, "kappa samples before refinement")->check(CLI::Range(3, 100000));

    // amplitude and weak-coupling
    std::vector<double> ks{1.0}, omegas{45.0}, omega_primes{60.0};
    auto* amp = app.add_subcommand("amplitude", "on-shell scattering amplitude f(k, w, w')");
    auto* weak = app.add_subcommand("weak-coupling", "first-order amplitude in the coupling alpha");
    for (auto* sub : {amp, weak}) {
        add_common(sub, common);
        sub->add_option("--k", ks, "wavenumbers (comma separated)")->delimiter(',')->check(CLI::PositiveNumber);
        sub->add_option("--omega-deg", omegas, "incoming directions in degrees")
            ->delimiter(',')
            ->check(CLI::Range(0.0, 90.0));
        sub->add_option("--omega-prime-deg", omega_primes, "outgoing directions in degrees, strictly inside (0, 90)")
            ->delimiter(',')
            ->check(CLI::Range(0.0, 90.0));
    }

    // eigenfunction
    double ef_k = 1.0, ef_omega = 45.0, ef_box = 4.0;
    int ef_points = 41;
    auto* ef = app.add_subcommand("eigenfunction", "sample psi+ on a square grid of [0, box]^2");
    add_common(ef, common);
    ef->add_option("--k", ef_k, "wavenumber")->check(CLI::PositiveNumber);
    ef->add_option("--omega-deg", ef_omega, "incoming direction in degrees")->check(CLI::Range(0.0, 90.0));
    ef->add_option("--box", ef_box, "side length of the sampled square")->check(CLI::PositiveNumber);
    ef->add_option("--points", ef_points, "samples per side")->check(CLI::Range(2, 2000));

    // resolvent
    std::string field_path;
    double z_re = -1.0, z_im = 0.0;
    long out_nx = 0, out_ny = 0;
    auto* res = app.add_subcommand("resolvent", "apply (-Delta_sigma - z)^{-1} to a sampled field");
    add_common(res, common);
    res->add_option("--field", field_path, "sampled field CSV")->required();
    res->add_option("--z-re", z_re, "real part of z");
    res->add_option("--z-im", z_im, "imaginary part of z");
    res->add_option("--nx", out_nx, "output samples along x1 (default: as the input)")->check(CLI::Range(1L, 100000L));
    res->add_option("--ny", out_ny, "output samples along x2 (default: as the input)")->check(CLI::Range(1L, 100000L));

    // scan
    double k_min = 0.1, k_max = 10.0, threshold = 1e-6;
    int scan_samples = 200;
    auto* scan = app.add_subcommand("scan", "smallest singular value of 1 + B(k + i0) on the positive axis");
    add_common(scan, common);
    scan->add_option("--k-min", k_min, "lower end of the k range")->check(CLI::PositiveNumber);
    scan->add_option("--k-max", k_max, "upper end of the k range")->check(CLI::PositiveNumber);
    scan->add_option("--samples", scan_samples, "number of k samples")->check(CLI::Range(2, 100000));
    scan->add_option("--threshold", threshold, "flag threshold relative to the median smin")
        ->check(CLI::PositiveNumber);

    // verify
    std::vector<int> ids;
    auto* verify = app.add_subcommand("verify", "run the acceptance checks and print a pass/fail table");
    verify->add_option("--criteria", ids, "criterion ids (default: all)")->delimiter(',')->check(CLI::Range(1, 10));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return 0;
        }
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (bs->parsed()) {
            if (!(kappa_max > kappa_min)) throw ValidationError("--kappa-max must exceed --kappa-min");
            const BoundaryPotential pot = load_potential(common.config);
            BoundStateOptions opt;
            opt.grid = common.grid();
            opt.samples = bs_samples;
            std::vector<std::string> warnings;
            const auto states = find_bound_states(pot, kappa_min, kappa_max, opt, &warnings);
            warn_all(warnings, err);
            Table t{{"kappa", "energy", "smin"}, {}};
            for (const auto& s : states) t.rows.push_back({s.kappa, s.energy, s.smin_at_root});
            emit_table(common, "bound-states", t, out);
            return 0;
        }
        if (amp->parsed() || weak->parsed()) {
            const bool full = amp->parsed();
            const BoundaryPotential pot = load_potential(common.config);
            for (double d : omega_primes)
                if (d == 0.0 || d == 90.0)
                    throw ValidationError("--omega-prime-deg must lie strictly between 0 and 90 (axis directions are excluded)");
            Table t{{"k", "omega_deg", "omega_prime_deg", "re_f", "im_f", "abs2_f", "method"}, {}};
            for (double k : ks)
                for (double w : omegas) {
                    const IncomingWave wave = IncomingWave::from_degrees(k, w);
                    std::optional<GeneralizedEigenfunction> psi;
                    if (full) psi.emplace(wave, pot, common.grid());
                    for (double wp : omega_primes) {
                        const OutgoingDirection dir = OutgoingDirection::from_degrees(wp);
                        const cplx f = full ? psi->amplitude(dir) : weak_coupling_amplitude(wave, dir, pot, pot.alpha()).f;
                        t.rows.push_back({k, w, wp, f.real(), f.imag(), std::norm(f),
                                          std::string(method_name(full ? AmplitudeMethod::full
                                                                       : AmplitudeMethod::weak_coupling))});
                    }
                }
            emit_table(common, full ? "amplitude" : "weak-coupling", t, out);
            return 0;
        }
        if (ef->parsed()) {
            const BoundaryPotential pot = load_potential(common.config);
            const GeneralizedEigenfunction psi(IncomingWave::from_degrees(ef_k, ef_omega), pot, common.grid());
            const double h = ef_box / (ef_points - 1);
            const std::size_t n = std::size_t(ef_points);
            std::vector<cplx> values(n * n);
            parallel_for(n, [&](std::size_t j) {
                for (std::size_t i = 0; i < n; ++i) values[j * n + i] = psi({i * h, j * h});
            });
            Table t{{"x1", "x2", "re_psi", "im_psi"}, {}};
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < n; ++i)
                    t.rows.push_back({i * h, j * h, values[j * n + i].real(), values[j * n + i].imag()});
            emit_table(common, "eigenfunction", t, out);
            return 0;
        }
        if (res->parsed()) {
            const BoundaryPotential pot = load_potential(common.config);
            const cplx z(z_re, z_im);
            if (z_im == 0.0 && z_re >= 0.0) throw ValidationError("--z-re/--z-im: z must lie off [0, inf)");
            SampledField f;
            try {
                f = read_field_csv(field_path);
            } catch (const ValidationError& e) {
                throw ValidationError(std::string("--field: ") + e.what());
            }
            const std::size_t nx = out_nx ? std::size_t(out_nx) : f.nx, ny = out_ny ? std::size_t(out_ny) : f.ny;
            const ResolventSolver solver(z, f, pot, common.grid());
            const SampledField u = solver.on_grid(nx, ny);
            emit(common, out, [&](std::ostream& os) {
                if (common.format == "csv") {
                    write_field_csv(os, u);
                    return;
                }
                Table t{{"x1", "x2", "re_u", "im_u"}, {}};
                for (std::size_t j = 0; j < ny; ++j)
                    for (std::size_t i = 0; i < nx; ++i)
                        t.rows.push_back({i * u.h, j * u.h, u.at(i, j).real(), u.at(i, j).imag()});
                nlohmann::json doc = to_json("resolvent", t);
                doc["h"] = u.h;
                doc["nx"] = nx;
                doc["ny"] = ny;
                os << doc.dump(2) << '\n';
            });
            return 0;
        }
        if (scan->parsed()) {
            if (!(k_max > k_min)) throw ValidationError("--k-max must exceed --k-min");
            const BoundaryPotential pot = load_potential(common.config);
            const AxisScan s = scan_positive_axis(pot, k_min, k_max, scan_samples, common.grid(), threshold);
            Table t{{"k", "smin", "flagged"}, {}};
            for (std::size_t i = 0; i < s.k.size(); ++i) t.rows.push_back({s.k[i], s.smin[i], s.smin[i] < s.threshold});
            for (const auto& [a, b] : s.flagged)
                err << "warning: smin below " << s.threshold << " on [" << a << ", " << b << "]\n";
            emit_table(common, "scan", t, out);
            return 0;
        }
        if (verify->parsed()) {
            if (ids.empty())
                for (int i = 1; i <= int(acceptance::criteria().size()); ++i) ids.push_back(i);
            int failures = 0;
            for (int id : ids) {
                const auto r = acceptance::run(id);
                out << acceptance::format_line(r) << '\n' << std::flush;
                if (!r.passed) ++failures;
            }
            out << ids.size() - std::size_t(failures) << " of " << ids.size() << " criteria passed\n";
            return failures == 0 ? 0 : 2;
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "numerical error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

} // namespace quarterwave::cli
