// arena - competition-driven multi-agent news forecasting engine.
//
// Subcommands:
//   run       execute a full competition from a config file
//   simulate  run with offline scripted backends enforced
//   report    rebuild the CSV report series from a ledger
//   metrics   recompute forecast errors from exported forecast CSVs

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "arena/errors.hpp"
#include "arena/metrics.hpp"
#include "arena/orchestrator.hpp"
#include "arena/report.hpp"
#include "arena/util.hpp"

namespace {

struct Overrides {
    std::string out;
    std::string prompt_variant;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double alpha = -1.0;
    int agents = -1;
    int epochs = -1;
    int rounds = -1;
};

void apply_overrides(arena::RunConfig& cfg, const Overrides& ov) {
    if (!ov.out.empty()) cfg.out_dir = ov.out;
    if (!ov.prompt_variant.empty()) cfg.prompt_variant = arena::parse_prompt_variant(ov.prompt_variant);
    if (ov.seed_set) cfg.seed = ov.seed;
    if (ov.alpha >= 0.0) cfg.alpha = ov.alpha;
    if (ov.agents >= 0) cfg.agents = ov.agents;
    if (ov.epochs >= 0) cfg.epochs = ov.epochs;
    if (ov.rounds >= 0) cfg.rounds = ov.rounds;
}

int run_command(const std::string& config_path, const Overrides& ov, bool simulate, bool resume) {
    arena::RunConfig cfg;
    try {
        cfg = arena::load_config(config_path);
        apply_overrides(cfg, ov);
        if (simulate) {
            cfg.llm.backend = "scripted";
            cfg.embedder.backend = "scripted";
            if (cfg.predictor.type == "remote") cfg.predictor.type = "scripted";
            if (cfg.llm.strategy.empty() && cfg.llm.script_path.empty()) cfg.llm.strategy = "sim";
        }
        arena::validate_config(cfg);
    } catch (const arena::ConfigInvalid& e) {
        std::cerr << "ConfigInvalid: " << e.what() << "\n";
        return 1;
    }

    try {
        arena::Orchestrator orch(cfg);
        const arena::RunResult result = orch.run(resume);
        const arena::Report report = arena::report_from_ledger(result.ledger_path);
        arena::write_report(report, cfg.out_dir);

        std::cout << "ledger:     " << result.ledger_path.string() << "\n";
        std::cout << "forecasts:  " << result.forecasts_path.string() << "\n";
        std::cout << "epochs run: " << result.epochs_run
                  << (result.terminated_early ? " (terminated early)" : "") << "\n";
        std::cout << "survivors:  ";
        for (std::size_t i = 0; i < result.final_population.size(); ++i) {
            std::cout << (i ? "," : "") << result.final_population[i];
        }
        std::cout << "\n";
        if (result.test_ensemble_mape >= 0.0) {
            std::cout << "test ensemble MAPE: " << arena::format_percent(result.test_ensemble_mape)
                      << "\n";
        }
        return 0;
    } catch (const arena::DataUnloadable& e) {
        std::cerr << "DataUnloadable: " << e.what() << "\n";
        return 2;
    } catch (const arena::ConfigInvalid& e) {
        std::cerr << "ConfigInvalid: " << e.what() << "\n";
        return 1;
    } catch (const arena::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int report_command(const std::string& ledger_path, const std::string& out_dir) {
    try {
        const arena::Report report = arena::report_from_ledger(ledger_path);
        arena::write_report(report, out_dir);
        std::cout << "report written to " << out_dir << "\n";
        return 0;
    } catch (const arena::LedgerCorrupt& e) {
        std::cerr << "LedgerCorrupt: " << e.what() << "\n";
        return 1;
    } catch (const arena::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

// Forecast CSVs use the export schema window_id,agent_id,step,value. The
// actuals file may carry any agent_id (commonly a single "actual" series).
std::map<std::pair<int, int>, std::map<int, double>> load_forecast_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw arena::DataUnloadable("cannot open " + path);
    std::map<std::pair<int, int>, std::map<int, double>> by_key;  // (window, agent) -> step -> value
    std::string line;
    bool header = true;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (header) {
            header = false;
            continue;
        }
        if (arena::trim(line).empty()) continue;
        int window = 0, agent = 0, step = 0;
        double value = 0.0;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        auto read_int = [&](int& out) {
            auto [np, ec] = std::from_chars(p, end, out);
            if (ec != std::errc() || np == end || *np != ',') {
                throw arena::MalformedRow("line " + std::to_string(line_no) + " of " + path);
            }
            p = np + 1;
        };
        read_int(window);
        read_int(agent);
        read_int(step);
        auto [np, ec] = std::from_chars(p, end, value);
        if (ec != std::errc()) {
            throw arena::MalformedRow("line " + std::to_string(line_no) + " of " + path);
        }
        by_key[{window, agent}][step] = value;
    }
    return by_key;
}

int metrics_command(const std::string& predicted_path, const std::string& actual_path,
                    const std::string& out_path) {
    try {
        const auto predicted = load_forecast_csv(predicted_path);
        const auto actuals_raw = load_forecast_csv(actual_path);

        // Collapse actuals to window -> series, ignoring their agent column.
        std::map<int, std::map<int, double>> actual_by_window;
        for (const auto& [key, series] : actuals_raw) actual_by_window[key.first] = series;

        std::string csv = "window_id,agent_id,mae,mse,rmse,mape\n";
        double mape_total = 0.0;
        int count = 0;
        for (const auto& [key, series] : predicted) {
            const auto aw = actual_by_window.find(key.first);
            if (aw == actual_by_window.end()) {
                throw arena::KeyMismatch("no actuals for window " + std::to_string(key.first));
            }
            std::vector<double> a, p;
            for (const auto& [step, v] : series) {
                const auto av = aw->second.find(step);
                if (av == aw->second.end()) {
                    throw arena::KeyMismatch("no actual for window " + std::to_string(key.first) +
                                             " step " + std::to_string(step));
                }
                p.push_back(v);
                a.push_back(av->second);
            }
            const arena::ForecastErrors e = arena::compute_errors(a, p);
            csv += std::to_string(key.first) + "," + std::to_string(key.second) + "," +
                   arena::format_double(e.mae) + "," + arena::format_double(e.mse) + "," +
                   arena::format_double(e.rmse) + "," + arena::format_double(e.mape) + "\n";
            mape_total += e.mape;
            ++count;
        }
        if (!out_path.empty()) {
            std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
            out << csv;
        } else {
            std::cout << csv;
        }
        if (count > 0) {
            std::cout << "mean MAPE over " << count
                      << " forecasts: " << arena::format_percent(mape_total / count) << "\n";
        }
        return 0;
    } catch (const arena::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"competition-driven multi-agent news forecasting engine"};
    app.require_subcommand(1);

    Overrides ov;
    std::string config_path;
    bool resume = false;

    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
        cmd->add_option("--seed", ov.seed, "override the run seed")
            ->each([&](const std::string&) { ov.seed_set = true; });
        cmd->add_option("--out", ov.out, "override the output directory");
        cmd->add_option("--prompt-variant", ov.prompt_variant, "original|paraphrased");
        cmd->add_option("--alpha", ov.alpha, "override the retention ratio");
        cmd->add_option("--agents", ov.agents, "override the agent count");
        cmd->add_option("--epochs", ov.epochs, "override the epoch count");
        cmd->add_option("--rounds", ov.rounds, "override rounds per epoch");
        cmd->add_flag("--resume", resume, "continue from the last completed round in the ledger");
    };

    CLI::App* run = app.add_subcommand("run", "execute a full competition");
    add_run_flags(run);

    CLI::App* simulate =
        app.add_subcommand("simulate", "run with offline scripted backends enforced");
    add_run_flags(simulate);

    std::string ledger_path, report_out = "out";
    CLI::App* report = app.add_subcommand("report", "rebuild report series from a ledger");
    report->add_option("--ledger", ledger_path, "ledger JSONL path")->required();
    report->add_option("--out", report_out, "output directory");

    std::string predicted_path, actual_path, metrics_out;
    CLI::App* metrics = app.add_subcommand("metrics", "recompute errors from forecast CSVs");
    metrics->add_option("--predicted", predicted_path, "forecast CSV (window_id,agent_id,step,value)")
        ->required();
    metrics->add_option("--actual", actual_path, "actuals CSV in the same schema")->required();
    metrics->add_option("--out", metrics_out, "write per-forecast errors to this CSV");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return run_command(config_path, ov, false, resume);
    if (simulate->parsed()) return run_command(config_path, ov, true, resume);
    if (report->parsed()) return report_command(ledger_path, report_out);
    if (metrics->parsed()) return metrics_command(predicted_path, actual_path, metrics_out);
    return 1;
}
