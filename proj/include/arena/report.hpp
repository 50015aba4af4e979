#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace arena {

// Plot-ready CSV series derived purely from a run ledger; regenerating from
// the same ledger is byte-identical.
struct Report {
    std::string scores_csv;      // epoch,round,agent,mape,rank,top,ave,cs
    std::string hhi_csv;         // epoch,round,hhi
    std::string lud_csv;         // epoch,agent,lud        (epoch boundaries, >= 2 epochs)
    std::string similarity_csv;  // epoch,similarity       (mean pairwise logic cosine)
    std::string cpd_mape_csv;    // agent,publications,cld,cpd,mean_mape
};

Report build_report(const std::vector<nlohmann::json>& records);
Report report_from_ledger(const std::filesystem::path& ledger_path);
void write_report(const Report& report, const std::filesystem::path& out_dir);

}  // namespace arena
