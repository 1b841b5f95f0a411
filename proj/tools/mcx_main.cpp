// mcx: bound / simulate / check / report front end for the concentration
// toolkit.  Flags only, no environment configuration; outputs are
// byte-reproducible for identical invocations.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcx/io.hpp"
#include "mcx/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerdict = 2;
constexpr int kExitSpec = 3;

std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
    // start:stop:step, inclusive of both ends when step divides the range.
    std::vector<double> parts;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t next = text.find(':', pos);
        std::string tok = text.substr(pos, next == std::string::npos ? next : next - pos);
        try {
            size_t used = 0;
            parts.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw CLI::ValidationError(flag, "expected start:stop:step, got '" + text + "'");
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (parts.size() != 3)
        throw CLI::ValidationError(flag, "expected start:stop:step, got '" + text + "'");
    double start = parts[0], stop = parts[1], step = parts[2];
    if (step <= 0 || stop < start)
        throw CLI::ValidationError(flag, "need step > 0 and stop >= start");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        double t = start + i * step;
        if (t > stop + 1e-9 * step) break;
        grid.push_back(std::min(t, stop));
    }
    return grid;
}

void apply_psi(mcx::SimulationConfig& config, const std::string& text) {
    if (text.empty()) return;
    if (text == "inv_R2" || text == "inv_8R2") {
        config.psi_preset = text;
        return;
    }
    try {
        size_t used = 0;
        config.psi = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw CLI::ValidationError("--psi", "expected a number, inv_R2, or inv_8R2");
    }
}

int write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return kExitOk;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open output file: " << out_path << "\n";
        return kExitUsage;
    }
    out << content;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"matrix concentration bounds: compute, simulate, verify"};
    app.require_subcommand(1);

    std::string config_path, out_path, t_grid_text = "0:10:1", theta_grid_text, psi_text;
    long long samples = 100000;
    std::uint64_t seed = 0;
    int workers = 1;
    int cases = 1000;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config)
            cmd->add_option("--config", config_path, "ensemble spec JSON file")->required();
        cmd->add_option("--t-grid", t_grid_text, "threshold grid start:stop:step");
        cmd->add_option("--samples", samples, "Monte Carlo sample count");
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_option("--workers", workers, "parallel simulation workers");
        cmd->add_option("--out", out_path, "output file (default: stdout)");
    };

    CLI::App* bound = app.add_subcommand("bound", "compute bounds and verdicts for an ensemble");
    add_common(bound, true);
    bound->add_option("--psi", psi_text, "psi value or preset (inv_R2, inv_8R2)");

    CLI::App* simulate = app.add_subcommand("simulate", "tail curve by enumeration or Monte Carlo");
    add_common(simulate, true);

    CLI::App* check = app.add_subcommand("check", "run the property suite");
    check->add_option("--seed", seed, "random seed");
    check->add_option("--cases", cases, "fuzz cases per property");

    CLI::App* report = app.add_subcommand("report", "combined bounds, simulation, and verdicts");
    add_common(report, true);
    report->add_option("--psi", psi_text, "psi value or preset (inv_R2, inv_8R2)");
    report->add_option("--theta-grid", theta_grid_text, "trace-mgf grid start:stop:step");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (check->parsed()) {
            mcx::PropertyReport rep = mcx::property_suite(seed, cases);
            std::cout << mcx::property_report_text(rep);
            return rep.all_pass() ? kExitOk : kExitVerdict;
        }

        mcx::SimulationConfig config;
        config.samples = samples;
        config.seed = seed;
        config.workers = workers;
        config.t_grid = parse_grid(t_grid_text, "--t-grid");
        if (!theta_grid_text.empty()) config.theta_grid = parse_grid(theta_grid_text, "--theta-grid");
        apply_psi(config, psi_text);

        mcx::EnsembleSpec spec = mcx::load_spec_file(config_path);

        if (simulate->parsed()) {
            mcx::TailCurve curve = mcx::simulate_tail(spec, config);
            int rc = write_output(out_path, mcx::tail_curve_csv(curve));
            if (rc != kExitOk) return rc;
            std::cerr << "simulate: method=" << curve.method << " points=" << curve.points.size()
                      << " samples=" << (curve.method == "exact" ? 0 : config.samples) << "\n";
            return kExitOk;
        }

        mcx::BoundReport rep = mcx::verify_bounds(spec, config);
        std::string body;
        if (bound->parsed()) {
            body = mcx::bound_report_json(rep);
        } else {
            std::string mgf = "[";
            for (const auto& [theta, value] : mcx::empirical_trace_mgf(spec, config)) {
                if (mgf.size() > 1) mgf += ", ";
                mgf += "[" + mcx::format_g(theta) + ", " + mcx::format_g(value) + "]";
            }
            mgf += "]";
            std::string report_json = mcx::bound_report_json(rep);
            while (!report_json.empty() && report_json.back() == '\n') report_json.pop_back();
            // Indent the nested report by two spaces for the combined object.
            std::string indented;
            for (char c : report_json) {
                indented += c;
                if (c == '\n') indented += "  ";
            }
            body = "{\n  \"bounds\": " + indented + ",\n  \"trace_mgf\": " + mgf +
                   ",\n  \"verdict\": " + mcx::json_quote(rep.all_pass() ? "PASS" : "FAIL") +
                   "\n}\n";
        }
        int rc = write_output(out_path, body);
        if (rc != kExitOk) return rc;
        return rep.all_pass() ? kExitOk : kExitVerdict;
    } catch (const mcx::SpecError& e) {
        std::cerr << "invalid spec: " << e.what() << "\n";
        return kExitSpec;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}
