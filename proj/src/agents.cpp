#include "arena/agents.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

#include "arena/errors.hpp"
#include "arena/util.hpp"

namespace arena {

namespace {

// Strips a leading list marker ("-", "*", "1.", "2)", "(3)"); returns whether
// one was found.
bool strip_list_marker(std::string& s) {
    std::size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    if (i < s.size() && (s[i] == '-' || s[i] == '*')) {
        ++i;
    } else {
        bool paren = false;
        if (i < s.size() && s[i] == '(') {
            paren = true;
            ++i;
        }
        std::size_t digits = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            ++i;
            ++digits;
        }
        if (digits == 0) return false;
        if (paren) {
            if (i >= s.size() || s[i] != ')') return false;
            ++i;
        } else {
            if (i >= s.size() || (s[i] != '.' && s[i] != ')')) return false;
            ++i;
        }
    }
    if (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) return false;
    s.erase(0, i);
    (void)start;
    return true;
}

// Splits a block at sentence-final punctuation followed by whitespace and an
// uppercase letter or digit. Keeps the punctuation with the left piece.
std::vector<std::string> split_sentences(const std::string& block) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i + 1 < block.size(); ++i) {
        const char c = block[i];
        if (c != '.' && c != '!' && c != '?') continue;
        std::size_t j = i + 1;
        while (j < block.size() && std::isspace(static_cast<unsigned char>(block[j]))) ++j;
        if (j == i + 1 || j >= block.size()) continue;
        const unsigned char next = static_cast<unsigned char>(block[j]);
        if (std::isupper(next) || std::isdigit(next)) {
            out.push_back(block.substr(start, i + 1 - start));
            start = j;
            i = j - 1;
        }
    }
    out.push_back(block.substr(start));
    return out;
}

}  // namespace

bool LogicDocument::contains(std::string_view clause) const {
    return std::find(clauses.begin(), clauses.end(), clause) != clauses.end();
}

std::vector<std::string> normalize_clauses(std::string_view text) {
    std::vector<std::string> clauses;
    auto push = [&](const std::string& raw) {
        const std::string normalized = collapse_whitespace(trim(raw));
        if (normalized.empty()) return;
        if (std::find(clauses.begin(), clauses.end(), normalized) == clauses.end()) {
            clauses.push_back(normalized);
        }
    };

    // Group physical lines into blocks: a list marker or a blank line starts a
    // new block, continuation lines append to the current one.
    std::vector<std::string> blocks;
    std::string current;
    for (std::string& line : split_lines(text)) {
        std::string stripped = line;
        const bool marker = strip_list_marker(stripped);
        if (trim(line).empty()) {
            if (!current.empty()) blocks.push_back(std::move(current));
            current.clear();
            continue;
        }
        if (marker) {
            if (!current.empty()) blocks.push_back(std::move(current));
            current = stripped;
        } else if (current.empty()) {
            current = line;
        } else {
            current += ' ';
            current += line;
        }
    }
    if (!current.empty()) blocks.push_back(std::move(current));

    for (const std::string& block : blocks) {
        for (const std::string& sentence : split_sentences(block)) push(sentence);
    }
    return clauses;
}

LogicDocument logic_from_text(std::string_view text, int version, LogicProvenance provenance) {
    LogicDocument doc;
    doc.clauses = normalize_clauses(text);
    doc.version = version;
    doc.provenance = provenance;
    return doc;
}

std::string logic_text(const LogicDocument& doc) {
    std::string out;
    for (std::size_t i = 0; i < doc.clauses.size(); ++i) {
        out += std::to_string(i + 1);
        out += ". ";
        out += doc.clauses[i];
        out += '\n';
    }
    if (!out.empty()) out.pop_back();
    return out;
}

std::string_view profile_name(Profile p) {
    return p == Profile::high_competitive ? "high_competitive" : "low_competitive";
}

std::vector<Agent> init_agents(int count, double ci, std::uint64_t seed) {
    if (count < 2) throw ConfigInvalid("init_agents: need at least 2 agents");
    if (ci < 0.0 || ci > 1.0) throw ConfigInvalid("init_agents: ci must be in [0,1]");

    const int high = static_cast<int>(std::llround(ci * count));  // round half up
    std::vector<int> order(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) order[static_cast<std::size_t>(i)] = i;
    std::mt19937_64 rng(derive_seed(seed, {0x0a6e47ull}));
    seeded_shuffle(order, rng);

    std::vector<bool> is_high(static_cast<std::size_t>(count), false);
    for (int i = 0; i < high; ++i) is_high[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;

    std::vector<Agent> agents;
    agents.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Agent a;
        a.id = i + 1;
        a.cumulative_score = 1.0;
        a.profile = is_high[static_cast<std::size_t>(i)] ? Profile::high_competitive
                                                         : Profile::low_competitive;
        a.alive = true;
        a.logic.version = 0;
        agents.push_back(std::move(a));
    }
    return agents;
}

double cld(const Agent& agent) {
    if (agent.publication_log.empty()) {
        throw NoPublications("agent " + std::to_string(agent.id) + " has no publications");
    }
    std::size_t authentic = 0;
    for (const PublicationRecord& p : agent.publication_log) {
        if (p.authentic) ++authentic;
    }
    return static_cast<double>(authentic) / static_cast<double>(agent.publication_log.size());
}

double cpd(const Agent& agent) { return 1.0 - cld(agent); }

}  // namespace arena
