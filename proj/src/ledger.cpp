#include "arena/ledger.hpp"

#include <memory>

#include "arena/errors.hpp"

namespace arena {

RunLedger RunLedger::create(const std::filesystem::path& path) {
    RunLedger l;
    l.path_ = path;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    l.out_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*l.out_) throw DataUnloadable("cannot open ledger for writing: " + path.string());
    return l;
}

RunLedger RunLedger::resume(const std::filesystem::path& path, std::uint64_t offset,
                            std::uint64_t next_seq) {
    std::filesystem::resize_file(path, offset);
    RunLedger l;
    l.path_ = path;
    l.out_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::app);
    if (!*l.out_) throw DataUnloadable("cannot reopen ledger: " + path.string());
    l.seq_ = next_seq;
    return l;
}

void RunLedger::append(std::string_view type, nlohmann::json data, Coords c) {
    if (!out_) return;
    std::lock_guard<std::mutex> lock(*mu_);
    nlohmann::json rec{
        {"v", kSchemaVersion}, {"seq", seq_++},      {"epoch", c.epoch},
        {"round", c.round},    {"agent", c.agent},   {"type", std::string(type)},
        {"data", std::move(data)},
    };
    *out_ << rec.dump() << '\n';
    out_->flush();
}

void RunLedger::warn(std::string_view message, Coords c) {
    append("warning", nlohmann::json{{"message", std::string(message)}}, c);
}

std::vector<RunLedger::Line> RunLedger::read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LedgerCorrupt("cannot open ledger: " + path.string());
    std::vector<Line> out;
    std::string line;
    std::uint64_t offset = 0;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        offset += line.size() + 1;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("type") || !j.contains("seq")) {
            throw LedgerCorrupt("record " + std::to_string(index) + " is not a valid ledger line");
        }
        out.push_back(Line{std::move(j), offset});
        ++index;
    }
    return out;
}

std::vector<nlohmann::json> RunLedger::read_all(const std::filesystem::path& path) {
    std::vector<nlohmann::json> out;
    for (Line& l : read_lines(path)) out.push_back(std::move(l.record));
    return out;
}

}  // namespace arena
