// Command-line front end: scenario runs, worst-case scaling sweeps and
// direct single-measurement localization. Exit status 0 means the command
// ran to completion (per-tap diagnostics included); nonzero means a
// configuration or I/O failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "otdm/cils.hpp"
#include "otdm/runner.hpp"
#include "otdm/scenario.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw otdm::Error("io-error", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw otdm::Error("io-error", "cannot write " + path);
    out << content;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OTDM Banyan fabric simulator with crosstalk identification and localization"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_path;
    bool coefficients_in_db = false;

    CLI::App* run = app.add_subcommand("run", "simulate a scenario file and emit report + CSV");
    run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--out", out_path, "CSV output path (default: stdout)");
    run->add_flag("--db", coefficients_in_db, "interpret x_inter/x_intra as dB values");

    int k_min = 1;
    int k_max = 1;
    double x_inter = 0.0;
    double x_intra = 0.0;
    int n = 2;
    std::string mode_name = "multiplicative";

    CLI::App* sweep = app.add_subcommand(
        "sweep", "worst-case localization over a range of fabric sizes, CSV per stage count");
    sweep->add_option("--k-min", k_min, "smallest stage count")->required();
    sweep->add_option("--k-max", k_max, "largest stage count")->required();
    sweep->add_option("--x-inter", x_inter, "interchannel crosstalk coefficient")->required();
    sweep->add_option("--x-intra", x_intra, "intrachannel crosstalk coefficient")->required();
    sweep->add_option("--n", n, "parallel degree of each router")->required();
    sweep->add_option("--mode", mode_name, "accumulation mode")
        ->check(CLI::IsMember({"linear", "multiplicative"}));
    sweep->add_option("--out", out_path, "CSV output path (default: stdout)");
    sweep->add_flag("--db", coefficients_in_db, "interpret --x-inter/--x-intra as dB values");

    int loc_k = 1;
    unsigned long long loc_src = 0;
    unsigned long long loc_dst = 0;
    double x_meas = 0.0;
    double tol = otdm::kDefaultTolerance;

    CLI::App* loc = app.add_subcommand(
        "localize", "localize a single crosstalk measurement on a routed lightpath");
    loc->add_option("--k", loc_k, "stage count of the fabric")->required();
    loc->add_option("--src", loc_src, "source port")->required();
    loc->add_option("--dst", loc_dst, "destination port")->required();
    loc->add_option("--x-meas", x_meas, "measured normalized crosstalk")->required();
    loc->add_option("--x-inter", x_inter, "interchannel crosstalk coefficient")->required();
    loc->add_option("--x-intra", x_intra, "intrachannel crosstalk coefficient")->required();
    loc->add_option("--n", n, "parallel degree of each router")->required();
    loc->add_option("--mode", mode_name, "accumulation mode")
        ->check(CLI::IsMember({"linear", "multiplicative"}));
    loc->add_option("--tol", tol, "stage-count tolerance");
    loc->add_flag("--db", coefficients_in_db, "interpret --x-inter/--x-intra as dB values");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const otdm::ScenarioConfig config =
                otdm::parse_scenario(read_file(scenario_path), coefficients_in_db);
            const otdm::ScenarioRunOutput output = otdm::cmd_run(config);
            if (out_path.empty()) {
                std::cerr << output.report_text;
                std::cout << output.csv_text;
            } else {
                write_file(out_path, output.csv_text);
                std::cout << output.report_text;
                std::cout << "csv written to " << out_path << "\n";
            }
            return 0;
        }

        if (sweep->parsed()) {
            otdm::SweepConfig config;
            config.k_min = k_min;
            config.k_max = k_max;
            config.x_inter = coefficients_in_db ? db_to_linear(x_inter) : x_inter;
            config.x_intra = coefficients_in_db ? db_to_linear(x_intra) : x_intra;
            config.n = n;
            config.mode = otdm::accumulation_mode_from_string(mode_name);
            const std::vector<otdm::SweepRow> rows = otdm::cmd_sweep(config);
            const std::string csv = otdm::sweep_csv(rows);
            if (out_path.empty()) {
                std::cout << csv;
            } else {
                write_file(out_path, csv);
                std::cout << "csv written to " << out_path << "\n";
            }
            return 0;
        }

        // localize
        const otdm::CrosstalkParams params(coefficients_in_db ? db_to_linear(x_inter) : x_inter,
                                           coefficients_in_db ? db_to_linear(x_intra) : x_intra,
                                           n, otdm::accumulation_mode_from_string(mode_name));
        const otdm::NetworkTopology topo = otdm::build_banyan(loc_k);
        const otdm::Lightpath path = topo.route(static_cast<otdm::PortId>(loc_src),
                                                static_cast<otdm::PortId>(loc_dst));
        try {
            const otdm::LocalizationReport report = otdm::localize(x_meas, path, params, tol);
            std::cout << "x_meas=" << report.x_meas << " N=" << report.n_count << " fault at ("
                      << report.fault_node.stage << ", " << report.fault_node.index
                      << ") residual=" << report.residual << " mode=" << to_string(report.mode)
                      << "\n";
        } catch (const otdm::AmbiguousMeasurementError& e) {
            std::cout << "diagnostic: " << e.code() << ": " << e.what() << "\n";
        } catch (const otdm::NothingToLocalizeError& e) {
            std::cout << "diagnostic: " << e.code() << ": " << e.what() << "\n";
        } catch (const otdm::InfeasibleCountError& e) {
            std::cout << "diagnostic: " << e.code() << ": " << e.what() << "\n";
        } catch (const otdm::NonIdentifiableUnitError& e) {
            std::cout << "diagnostic: " << e.code() << ": " << e.what() << "\n";
        }
        return 0;
    } catch (const otdm::Error& e) {
        std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
