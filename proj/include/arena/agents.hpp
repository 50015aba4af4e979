#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace arena {

enum class LogicProvenance { initial, reflected };

// A news-selection logic as an ordered set of normalized clauses. Clauses are
// trimmed, whitespace-collapsed, case-preserved and unique; versions increase
// every time an agent adopts a new logic.
struct LogicDocument {
    std::vector<std::string> clauses;
    int version = 0;
    LogicProvenance provenance = LogicProvenance::initial;

    bool contains(std::string_view clause) const;
    bool empty() const { return clauses.empty(); }
};

// Splits free text into clauses: list markers ("-", "*", "1.", "(2)") start a
// new clause, sentence boundaries split within a block, duplicates collapse
// to their first occurrence. This is the unit the reflection diff operates on.
std::vector<std::string> normalize_clauses(std::string_view text);

LogicDocument logic_from_text(std::string_view text, int version, LogicProvenance provenance);

// Canonical rendering as a numbered list; normalize_clauses() round-trips it.
std::string logic_text(const LogicDocument& doc);

enum class Profile { high_competitive, low_competitive };

std::string_view profile_name(Profile p);

struct PublicationRecord {
    int epoch = 0;
    int round = 0;
    bool broadcast = false;
    std::vector<int> targets;  // expanded recipient list
    bool authentic = false;    // sender declared no fabricated content
    std::string published_text;
};

struct Agent {
    int id = 0;
    LogicDocument logic;
    double cumulative_score = 1.0;
    Profile profile = Profile::low_competitive;
    bool alive = true;
    std::vector<PublicationRecord> publication_log;
};

// round(ci * count) agents are profiled high-competitive; which ones is a
// seeded draw. Every agent starts at M = 1.0 with an empty version-0 logic.
std::vector<Agent> init_agents(int count, double ci, std::uint64_t seed);

// Collaborative degree: authentic publications / all publications.
double cld(const Agent& agent);
double cpd(const Agent& agent);  // 1 - cld

}  // namespace arena
