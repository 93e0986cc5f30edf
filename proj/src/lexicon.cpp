#include "see/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "see/io.hpp"

namespace see {

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            return out;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
    throw std::runtime_error("lexicon parse error at line " + std::to_string(line_no) +
                             ": " + what);
}

}  // namespace

const LexiconRecord* Lexicon::find(const std::string& word) const {
    const auto it = index.find(word);
    return it == index.end() ? nullptr : &records[it->second];
}

std::uint32_t UnitVocab::morpheme_count() const {
    return static_cast<std::uint32_t>(morpheme_ids.size());
}

std::uint32_t UnitVocab::sememe_count() const {
    return static_cast<std::uint32_t>(sememe_ids.size());
}

std::optional<std::uint32_t> UnitVocab::morpheme_id(const std::string& text) const {
    const auto it = morpheme_ids.find(text);
    if (it == morpheme_ids.end()) return std::nullopt;
    return it->second;
}

std::optional<std::uint32_t> UnitVocab::sememe_id(const std::string& text) const {
    const auto it = sememe_ids.find(text);
    if (it == sememe_ids.end()) return std::nullopt;
    return it->second;
}

const AffixSet& AffixSet::builtin() {
    // Mirrors data/affixes.txt.
    static const AffixSet set{
        {"anti", "auto", "co", "de", "dis", "em", "en", "fore", "il", "im", "in",
         "inter", "ir", "mid", "mis", "non", "over", "pre", "re", "semi", "sub",
         "super", "trans", "un", "under"},
        {"able", "al", "ation", "ative", "ed", "en", "er", "es", "est", "ful",
         "ial", "ible", "ic", "ing", "ion", "ious", "ition", "itive", "ity",
         "ive", "less", "ly", "ment", "ness", "ous", "s", "tion", "ty", "y"},
    };
    return set;
}

Lexicon parse_lexicon(std::istream& in) {
    Lexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        const auto fields = split(line, '\t');
        if (fields.size() != 3)
            parse_fail(line_no, "expected 3 tab-separated fields, got " +
                                    std::to_string(fields.size()));

        LexiconRecord rec;
        rec.word = fields[0];
        if (rec.word.empty()) parse_fail(line_no, "empty word");
        if (lex.index.count(rec.word))
            throw std::runtime_error("duplicate word '" + rec.word + "' at line " +
                                     std::to_string(line_no));

        if (fields[1] == "-") {
            rec.morphemes = segment_morphemes(rec.word);
        } else {
            rec.morphemes = split(fields[1], ',');
            if (rec.morphemes.empty() ||
                std::any_of(rec.morphemes.begin(), rec.morphemes.end(),
                            [](const std::string& s) { return s.empty(); }))
                parse_fail(line_no, "empty morpheme in '" + fields[1] + "'");
        }

        if (fields[2].empty()) parse_fail(line_no, "record has no senses");
        for (const auto& sense_text : split(fields[2], ';')) {
            auto sememes = split(sense_text, '|');
            if (sense_text.empty() ||
                std::any_of(sememes.begin(), sememes.end(),
                            [](const std::string& s) { return s.empty(); }))
                parse_fail(line_no, "sense with an empty sememe");
            rec.senses.push_back(std::move(sememes));
        }

        lex.index.emplace(rec.word, lex.records.size());
        lex.records.push_back(std::move(rec));
    }
    return lex;
}

Lexicon parse_lexicon_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_lexicon(in);
}

Lexicon parse_lexicon_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lexicon file: " + path.string());
    return parse_lexicon(in);
}

std::string serialize_lexicon(const Lexicon& lex) {
    std::string out;
    for (const auto& rec : lex.records) {
        out += rec.word;
        out += '\t';
        for (std::size_t i = 0; i < rec.morphemes.size(); ++i) {
            if (i) out += ',';
            out += rec.morphemes[i];
        }
        out += '\t';
        for (std::size_t s = 0; s < rec.senses.size(); ++s) {
            if (s) out += ';';
            for (std::size_t i = 0; i < rec.senses[s].size(); ++i) {
                if (i) out += '|';
                out += rec.senses[s][i];
            }
        }
        out += '\n';
    }
    return out;
}

MorphTable parse_morph_table(std::istream& in) {
    MorphTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split(line, '\t');
        if (fields.size() != 2)
            throw std::runtime_error("morph table parse error at line " +
                                     std::to_string(line_no) + ": expected 2 fields");
        auto morphs = split(fields[1], ',');
        if (fields[0].empty() || morphs.empty() ||
            std::any_of(morphs.begin(), morphs.end(),
                        [](const std::string& s) { return s.empty(); }))
            throw std::runtime_error("morph table parse error at line " +
                                     std::to_string(line_no) + ": empty entry");
        table[fields[0]] = std::move(morphs);
    }
    return table;
}

MorphTable parse_morph_table_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open morph table: " + path.string());
    return parse_morph_table(in);
}

std::vector<std::string> segment_morphemes(const std::string& word,
                                           const MorphTable* table,
                                           const AffixSet& affixes) {
    if (word.empty()) throw std::invalid_argument("segment_morphemes: empty word");
    if (table) {
        const auto it = table->find(word);
        if (it != table->end()) return it->second;
    }

    constexpr std::size_t kMinStem = 3;
    std::string stem = word;
    std::string prefix, suffix;

    const auto longest = [](const std::vector<std::string>& cands, const std::string& s,
                            bool at_front) {
        std::string best;
        for (const auto& a : cands) {
            if (a.size() <= best.size() || a.size() + kMinStem > s.size()) continue;
            const bool hit = at_front ? s.compare(0, a.size(), a) == 0
                                      : s.compare(s.size() - a.size(), a.size(), a) == 0;
            if (hit) best = a;
        }
        return best;
    };

    prefix = longest(affixes.prefixes, stem, true);
    if (!prefix.empty()) stem = stem.substr(prefix.size());
    suffix = longest(affixes.suffixes, stem, false);
    if (!suffix.empty()) stem = stem.substr(0, stem.size() - suffix.size());

    std::vector<std::string> out;
    if (!prefix.empty()) out.push_back(prefix);
    out.push_back(stem);
    if (!suffix.empty()) out.push_back(suffix);
    return out;
}

AffixSet parse_affix_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open affix file: " + path.string());
    AffixSet set;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split(line, '\t');
        if (fields.size() != 2 || (fields[0] != "prefix" && fields[0] != "suffix"))
            throw std::runtime_error("affix file: expected 'prefix<TAB>text' or 'suffix<TAB>text'");
        (fields[0] == "prefix" ? set.prefixes : set.suffixes).push_back(fields[1]);
    }
    return set;
}

UnitVocab build_unit_vocab(const Lexicon& lex) {
    UnitVocab vocab;
    vocab.units.push_back({"<pad>", UnitKind::reserved});
    vocab.units.push_back({"<zero>", UnitKind::reserved});

    const auto add = [&vocab](const std::string& text, UnitKind kind) {
        auto& ids = kind == UnitKind::morpheme ? vocab.morpheme_ids : vocab.sememe_ids;
        if (ids.count(text)) return;
        ids.emplace(text, vocab.size());
        vocab.units.push_back({text, kind});
    };

    for (const auto& rec : lex.records) {
        for (const auto& m : rec.morphemes) add(m, UnitKind::morpheme);
        for (const auto& sense : rec.senses)
            for (const auto& s : sense) add(s, UnitKind::sememe);
    }
    return vocab;
}

IndexGrid compile_grid(const LexiconRecord& rec, const UnitVocab& vocab, int rank,
                       int order) {
    if (rank < 2) throw std::invalid_argument("compile_grid: rank must be >= 2");
    if (order < 1) throw std::invalid_argument("compile_grid: order must be >= 1");

    IndexGrid grid(rank, order, UnitVocab::kZeroId);

    for (int k = 0; k < order; ++k) {
        if (static_cast<std::size_t>(k) < rec.morphemes.size()) {
            const auto id = vocab.morpheme_id(rec.morphemes[k]);
            if (!id)
                throw std::runtime_error("compile_grid: unknown morpheme '" +
                                         rec.morphemes[k] + "'");
            grid.at(0, k) = *id;
        } else {
            grid.at(0, k) = UnitVocab::kPadId;
        }
    }

    const int sense_rows = std::min<int>(rank - 1, static_cast<int>(rec.senses.size()));
    for (int j = 0; j < sense_rows; ++j) {
        const auto& sense = rec.senses[j];
        for (int k = 0; k < order; ++k) {
            if (static_cast<std::size_t>(k) < sense.size()) {
                const auto id = vocab.sememe_id(sense[k]);
                if (!id)
                    throw std::runtime_error("compile_grid: unknown sememe '" + sense[k] +
                                             "'");
                grid.at(j + 1, k) = *id;
            } else {
                grid.at(j + 1, k) = UnitVocab::kPadId;
            }
        }
    }
    // rows past the last present sense stay all-ZERO
    return grid;
}

GridTable compile_table(const Lexicon& lex, const std::vector<std::string>& tokens,
                        const UnitVocab& vocab, int rank, int order,
                        const MorphTable* morph_table, const AffixSet& affixes) {
    if (tokens.empty()) throw std::invalid_argument("compile_table: no tokens");

    GridTable table;
    table.rank = rank;
    table.order = order;
    table.vocab = vocab;
    table.tokens = tokens;
    table.grids.reserve(tokens.size());
    table.oov.reserve(tokens.size());

    std::uint64_t senses_total = 0;
    std::uint64_t truncated = 0;
    std::uint64_t pad_cells = 0;

    for (const auto& token : tokens) {
        if (table.word_ids.count(token))
            throw std::invalid_argument("compile_table: duplicate token '" + token + "'");
        table.word_ids.emplace(token, table.grids.size());

        const LexiconRecord* rec = lex.find(token);
        IndexGrid grid;
        if (rec) {
            grid = compile_grid(*rec, vocab, rank, order);
            senses_total += rec->senses.size();
            if (rec->senses.size() > static_cast<std::size_t>(rank - 1))
                truncated += rec->senses.size() - static_cast<std::size_t>(rank - 1);
            table.oov.push_back(0);
        } else {
            grid = IndexGrid(rank, order, UnitVocab::kZeroId);
            const auto morphs = segment_morphemes(token, morph_table, affixes);
            for (int k = 0; k < order; ++k) {
                if (static_cast<std::size_t>(k) < morphs.size())
                    grid.at(0, k) = vocab.morpheme_id(morphs[k]).value_or(UnitVocab::kPadId);
                else
                    grid.at(0, k) = UnitVocab::kPadId;
            }
            table.oov.push_back(1);
        }
        pad_cells += static_cast<std::uint64_t>(
            std::count(grid.ids.begin(), grid.ids.end(), UnitVocab::kPadId));
        table.grids.push_back(std::move(grid));
    }

    const auto n = static_cast<std::uint64_t>(tokens.size());
    table.stats.tokens = n;
    table.stats.oov = static_cast<std::uint64_t>(
        std::count(table.oov.begin(), table.oov.end(), std::uint8_t{1}));
    table.stats.oov_fraction = static_cast<double>(table.stats.oov) / static_cast<double>(n);
    table.stats.mean_senses = static_cast<double>(senses_total) / static_cast<double>(n);
    table.stats.truncated_senses = truncated;
    table.stats.pad_fill_rate = static_cast<double>(pad_cells) /
                                static_cast<double>(n * static_cast<std::uint64_t>(rank) *
                                                    static_cast<std::uint64_t>(order));
    return table;
}

CoverageStats coverage_stats(const GridTable& table) { return table.stats; }

namespace {
constexpr char kGridMagic[5] = "SEEG";
constexpr std::uint32_t kGridVersion = 1;
}  // namespace

void write_grid_table(std::ostream& os, const GridTable& table) {
    io::write_magic(os, kGridMagic);
    io::write_le<std::uint32_t>(os, kGridVersion);
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(table.rank));
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(table.order));
    io::write_le<std::uint64_t>(os, table.tokens.size());
    io::write_le<std::uint64_t>(os, table.vocab.units.size());

    for (const auto& unit : table.vocab.units) {
        io::write_le<std::uint8_t>(os, static_cast<std::uint8_t>(unit.kind));
        io::write_str(os, unit.text);
    }
    for (std::size_t w = 0; w < table.tokens.size(); ++w) {
        io::write_str(os, table.tokens[w]);
        io::write_le<std::uint8_t>(os, table.oov[w]);
        for (std::uint32_t id : table.grids[w].ids) io::write_le<std::uint32_t>(os, id);
    }
    io::write_le<std::uint64_t>(os, table.stats.tokens);
    io::write_le<std::uint64_t>(os, table.stats.oov);
    io::write_f64(os, table.stats.oov_fraction);
    io::write_f64(os, table.stats.mean_senses);
    io::write_le<std::uint64_t>(os, table.stats.truncated_senses);
    io::write_f64(os, table.stats.pad_fill_rate);
}

GridTable read_grid_table(std::istream& is) {
    io::expect_magic(is, kGridMagic, "grid table file");
    const auto version = io::read_le<std::uint32_t>(is);
    if (version != kGridVersion)
        throw std::runtime_error("grid table file: unsupported version " +
                                 std::to_string(version));

    GridTable table;
    table.rank = static_cast<int>(io::read_le<std::uint32_t>(is));
    table.order = static_cast<int>(io::read_le<std::uint32_t>(is));
    const auto n_tokens = io::read_le<std::uint64_t>(is);
    const auto n_units = io::read_le<std::uint64_t>(is);

    for (std::uint64_t u = 0; u < n_units; ++u) {
        const auto kind = static_cast<UnitKind>(io::read_le<std::uint8_t>(is));
        auto text = io::read_str(is);
        const auto id = static_cast<std::uint32_t>(table.vocab.units.size());
        if (kind == UnitKind::morpheme) table.vocab.morpheme_ids.emplace(text, id);
        if (kind == UnitKind::sememe) table.vocab.sememe_ids.emplace(text, id);
        table.vocab.units.push_back({std::move(text), kind});
    }
    for (std::uint64_t w = 0; w < n_tokens; ++w) {
        auto token = io::read_str(is);
        table.oov.push_back(io::read_le<std::uint8_t>(is));
        IndexGrid grid(table.rank, table.order);
        for (auto& id : grid.ids) id = io::read_le<std::uint32_t>(is);
        table.word_ids.emplace(token, table.grids.size());
        table.tokens.push_back(std::move(token));
        table.grids.push_back(std::move(grid));
    }
    table.stats.tokens = io::read_le<std::uint64_t>(is);
    table.stats.oov = io::read_le<std::uint64_t>(is);
    table.stats.oov_fraction = io::read_f64(is);
    table.stats.mean_senses = io::read_f64(is);
    table.stats.truncated_senses = io::read_le<std::uint64_t>(is);
    table.stats.pad_fill_rate = io::read_f64(is);
    return table;
}

void write_grid_table_file(const std::filesystem::path& path, const GridTable& table) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    write_grid_table(os, table);
}

GridTable read_grid_table_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    return read_grid_table(is);
}

}  // namespace see
