#include "arena/report.hpp"

#include <fstream>
#include <map>

#include "arena/errors.hpp"
#include "arena/ledger.hpp"
#include "arena/util.hpp"

namespace arena {

namespace {

std::string num(const nlohmann::json& v) { return v.dump(); }

}  // namespace

Report build_report(const std::vector<nlohmann::json>& records) {
    Report r;
    r.scores_csv = "epoch,round,agent,mape,rank,top,ave,cs\n";
    r.hhi_csv = "epoch,round,hhi\n";
    r.lud_csv = "epoch,agent,lud\n";
    r.similarity_csv = "epoch,similarity\n";
    r.cpd_mape_csv = "agent,publications,cld,cpd,mean_mape\n";

    struct PerAgent {
        int publications = 0;
        int authentic = 0;
        double mape_total = 0.0;
        int mape_rounds = 0;
    };
    std::map<int, PerAgent> per_agent;

    for (const nlohmann::json& rec : records) {
        const std::string type = rec.value("type", std::string());
        const int epoch = rec.value("epoch", 0);
        const int round = rec.value("round", 0);
        const int agent = rec.value("agent", -1);
        if (!rec.contains("data")) continue;
        const nlohmann::json& data = rec.at("data");

        if (type == "round_scores") {
            for (const auto& s : data.at("scores")) {
                const int id = s.at("agent").get<int>();
                r.scores_csv += std::to_string(epoch) + "," + std::to_string(round) + "," +
                                std::to_string(id) + "," + num(s.at("mape")) + "," +
                                num(s.at("rank")) + "," + num(s.at("top")) + "," +
                                num(s.at("ave")) + "," + num(s.at("cs_after")) + "\n";
                per_agent[id].mape_total += s.at("mape").get<double>();
                per_agent[id].mape_rounds += 1;
            }
            r.hhi_csv += std::to_string(epoch) + "," + std::to_string(round) + "," +
                         num(data.at("hhi")) + "\n";
        } else if (type == "lud_epoch") {
            r.lud_csv += std::to_string(epoch) + "," + std::to_string(agent) + "," +
                         num(data.at("value")) + "\n";
        } else if (type == "epoch_similarity") {
            r.similarity_csv += std::to_string(epoch) + "," + num(data.at("value")) + "\n";
        } else if (type == "publication") {
            per_agent[agent].publications += 1;
            if (data.value("authentic", false)) per_agent[agent].authentic += 1;
        }
    }

    for (const auto& [id, pa] : per_agent) {
        if (pa.publications == 0) continue;  // CLD undefined without publications
        const double cld = static_cast<double>(pa.authentic) / static_cast<double>(pa.publications);
        const double mean_mape =
            pa.mape_rounds == 0 ? 0.0 : pa.mape_total / static_cast<double>(pa.mape_rounds);
        r.cpd_mape_csv += std::to_string(id) + "," + std::to_string(pa.publications) + "," +
                          format_double(cld) + "," + format_double(1.0 - cld) + "," +
                          format_double(mean_mape) + "\n";
    }
    return r;
}

Report report_from_ledger(const std::filesystem::path& ledger_path) {
    return build_report(RunLedger::read_all(ledger_path));
}

void write_report(const Report& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto write = [&](const char* name, const std::string& content) {
        std::ofstream out(out_dir / name, std::ios::binary | std::ios::trunc);
        if (!out) throw DataUnloadable("cannot write report file: " + (out_dir / name).string());
        out << content;
    };
    write("scores.csv", report.scores_csv);
    write("hhi.csv", report.hhi_csv);
    write("lud.csv", report.lud_csv);
    write("similarity.csv", report.similarity_csv);
    write("cpd_mape.csv", report.cpd_mape_csv);
}

}  // namespace arena
