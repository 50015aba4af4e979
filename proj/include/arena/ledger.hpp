#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace arena {

// Append-only JSON-lines event log. One record per line:
//   {"v":1,"seq":N,"epoch":E,"round":R,"agent":A,"type":"...","data":{...}}
// Records are flushed as they are written so a crashed run can be replayed up
// to its last complete round. agent = -1 marks run-level records.
struct LedgerCoords {
    int epoch = 0;
    int round = 0;
    int agent = -1;
};

class RunLedger {
  public:
    using Coords = LedgerCoords;

    static constexpr int kSchemaVersion = 1;

    RunLedger() = default;  // sinkless; append() becomes a no-op
    static RunLedger create(const std::filesystem::path& path);
    // Continues an existing file, keeping everything up to byte `offset`.
    static RunLedger resume(const std::filesystem::path& path, std::uint64_t offset,
                            std::uint64_t next_seq);

    void append(std::string_view type, nlohmann::json data, Coords c = {});
    void warn(std::string_view message, Coords c = {});

    bool active() const { return out_ != nullptr; }
    const std::filesystem::path& path() const { return path_; }
    std::uint64_t next_seq() const { return seq_; }

    // Whole-file readers. Throw LedgerCorrupt with the offending record index.
    static std::vector<nlohmann::json> read_all(const std::filesystem::path& path);
    struct Line {
        nlohmann::json record;
        std::uint64_t end_offset = 0;  // byte offset just past this line
    };
    static std::vector<Line> read_lines(const std::filesystem::path& path);

  private:
    std::filesystem::path path_;
    std::unique_ptr<std::ofstream> out_;
    std::uint64_t seq_ = 0;
    std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
};

}  // namespace arena
