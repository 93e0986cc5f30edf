#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace see {

/// One lexicon entry: the word, its ordered morphemes, and its ordered
/// senses, each an ordered list of sememes.
struct LexiconRecord {
    std::string word;
    std::vector<std::string> morphemes;                // length >= 1
    std::vector<std::vector<std::string>> senses;      // each sense non-empty

    bool operator==(const LexiconRecord&) const = default;
};

struct Lexicon {
    std::vector<LexiconRecord> records;
    std::unordered_map<std::string, std::size_t> index;  // word -> records slot

    const LexiconRecord* find(const std::string& word) const;
    bool operator==(const Lexicon& other) const { return records == other.records; }
};

enum class UnitKind : std::uint8_t { reserved = 0, morpheme = 1, sememe = 2 };

/// Joint id space over morphemes and sememes plus two reserved units.
/// A string used both as a morpheme and as a sememe gets two ids, one per
/// role, so size() == |S| + |M| + 2 always holds.
struct UnitVocab {
    static constexpr std::uint32_t kPadId = 0;   // learned pad inside partial rows
    static constexpr std::uint32_t kZeroId = 1;  // frozen all-zero unit for absent rows

    struct Entry {
        std::string text;
        UnitKind kind;
        bool operator==(const Entry&) const = default;
    };

    std::vector<Entry> units;
    std::unordered_map<std::string, std::uint32_t> morpheme_ids;
    std::unordered_map<std::string, std::uint32_t> sememe_ids;

    std::uint32_t size() const { return static_cast<std::uint32_t>(units.size()); }
    std::uint32_t morpheme_count() const;  // |M|
    std::uint32_t sememe_count() const;    // |S|

    std::optional<std::uint32_t> morpheme_id(const std::string& text) const;
    std::optional<std::uint32_t> sememe_id(const std::string& text) const;

    bool operator==(const UnitVocab& other) const { return units == other.units; }
};

/// r x o matrix of unit ids. Row 0 holds morphemes (PAD-padded), rows
/// 1..r-1 hold one sense each (PAD-padded); absent senses are all-ZERO rows.
struct IndexGrid {
    int rank = 0;
    int order = 0;
    std::vector<std::uint32_t> ids;  // rank * order, row-major

    IndexGrid() = default;
    IndexGrid(int r, int o, std::uint32_t fill = 0)
        : rank(r), order(o), ids(static_cast<std::size_t>(r) * o, fill) {}

    std::uint32_t& at(int row, int col) { return ids[static_cast<std::size_t>(row) * order + col]; }
    std::uint32_t at(int row, int col) const { return ids[static_cast<std::size_t>(row) * order + col]; }

    bool operator==(const IndexGrid&) const = default;
};

struct CoverageStats {
    std::uint64_t tokens = 0;
    std::uint64_t oov = 0;
    double oov_fraction = 0.0;
    double mean_senses = 0.0;          // lexicon senses per token, 0 for OOV
    std::uint64_t truncated_senses = 0;
    double pad_fill_rate = 0.0;        // PAD cells / all grid cells

    bool operator==(const CoverageStats&) const = default;
};

/// One grid per token of the model vocabulary, plus the unit vocabulary the
/// ids refer to. Immutable after compilation.
struct GridTable {
    int rank = 0;
    int order = 0;
    std::vector<std::string> tokens;
    std::unordered_map<std::string, std::size_t> word_ids;
    std::vector<IndexGrid> grids;
    std::vector<std::uint8_t> oov;  // 1 when the token was absent from the lexicon
    UnitVocab vocab;
    CoverageStats stats;
};

using MorphTable = std::unordered_map<std::string, std::vector<std::string>>;

struct AffixSet {
    std::vector<std::string> prefixes;
    std::vector<std::string> suffixes;
    static const AffixSet& builtin();
};

/// Parses the tab-separated lexicon format:
///   word<TAB>morph1,morph2,...<TAB>semA|semB;semC|semD
/// A morpheme field of "-" applies fallback segmentation. Blank lines and
/// lines starting with '#' are skipped. Throws with the offending line
/// number on malformed input and on duplicate words.
Lexicon parse_lexicon(std::istream& in);
Lexicon parse_lexicon_text(std::string_view text);
Lexicon parse_lexicon_file(const std::filesystem::path& path);

/// Inverse of parse_lexicon; morphemes are always written explicitly.
std::string serialize_lexicon(const Lexicon& lex);

/// word<TAB>morph1,morph2,... per line.
MorphTable parse_morph_table(std::istream& in);
MorphTable parse_morph_table_file(const std::filesystem::path& path);

/// Segments a word into morphemes. Uses the table when it has the word,
/// otherwise strips at most one longest-match prefix and one longest-match
/// suffix (stem stays >= 3 chars). Never returns an empty list: the whole
/// word is its own morpheme as a last resort.
std::vector<std::string> segment_morphemes(const std::string& word,
                                           const MorphTable* table = nullptr,
                                           const AffixSet& affixes = AffixSet::builtin());

AffixSet parse_affix_file(const std::filesystem::path& path);

/// Assigns ids 2.. in first-appearance order (per record: morphemes, then
/// sense sememes); ids 0 and 1 are the reserved pad and zero units.
UnitVocab build_unit_vocab(const Lexicon& lex);

/// Compiles one record into an r x o grid. Row 0 takes the first o
/// morphemes (PAD-padded, truncated past o); rows 1..min(#senses, r-1) take
/// the first o sememes of each sense; remaining rows are all-ZERO.
/// Throws on units missing from the vocab, naming the unit.
IndexGrid compile_grid(const LexiconRecord& rec, const UnitVocab& vocab, int rank, int order);

/// One grid per token. Tokens absent from the lexicon get a morpheme-only
/// grid via fallback segmentation (sense rows all-ZERO); fallback morphemes
/// missing from the vocab map to PAD. Fills GridTable::stats.
GridTable compile_table(const Lexicon& lex, const std::vector<std::string>& tokens,
                        const UnitVocab& vocab, int rank, int order,
                        const MorphTable* morph_table = nullptr,
                        const AffixSet& affixes = AffixSet::builtin());

CoverageStats coverage_stats(const GridTable& table);

// Versioned binary container ("SEEG") embedding vocab, grids and stats.
void write_grid_table(std::ostream& os, const GridTable& table);
GridTable read_grid_table(std::istream& is);
void write_grid_table_file(const std::filesystem::path& path, const GridTable& table);
GridTable read_grid_table_file(const std::filesystem::path& path);

}  // namespace see
