#include <doctest.h>

#include <stdexcept>
#include <random>
#include <sstream>

#include "see/lexicon.hpp"

using see::IndexGrid;
using see::Lexicon;
using see::UnitVocab;

namespace {

constexpr const char* kChairLine =
    "chair\t-\tComeTogether|manage|fact;furniture|sit";
constexpr const char* kPowerLine =
    "power\t-\tphysical|PhysicsPower;AnimalHuman|Power|politics;math|symbol|Quantity;"
    "country|place|politics;machine|function|Strength";

Lexicon table1_lexicon() {
    return see::parse_lexicon_text(std::string(kChairLine) + "\n" + kPowerLine + "\n");
}

// Random lexicon for property checks.
Lexicon random_lexicon(std::mt19937_64& rng, int n_words) {
    std::string text;
    for (int w = 0; w < n_words; ++w) {
        text += "w" + std::to_string(w) + "\tm" + std::to_string(rng() % 7);
        if (rng() % 2) text += ",m" + std::to_string(rng() % 7);
        text += '\t';
        const int senses = 1 + static_cast<int>(rng() % 5);
        for (int s = 0; s < senses; ++s) {
            if (s) text += ';';
            const int k = 1 + static_cast<int>(rng() % 4);
            for (int i = 0; i < k; ++i) {
                if (i) text += '|';
                text += "s" + std::to_string(rng() % 11);
            }
        }
        text += '\n';
    }
    return see::parse_lexicon_text(text);
}

}  // namespace

TEST_CASE("parse_lexicon reads the chair record") {
    const Lexicon lex = see::parse_lexicon_text(std::string(kChairLine) + "\n");
    REQUIRE(lex.records.size() == 1);
    const auto& rec = lex.records[0];
    CHECK(rec.word == "chair");
    CHECK(rec.morphemes == std::vector<std::string>{"chair"});
    REQUIRE(rec.senses.size() == 2);
    CHECK(rec.senses[0] == std::vector<std::string>{"ComeTogether", "manage", "fact"});
    CHECK(rec.senses[1] == std::vector<std::string>{"furniture", "sit"});
}

TEST_CASE("parse_lexicon on an empty stream yields an empty lexicon") {
    CHECK(see::parse_lexicon_text("").records.empty());
    CHECK(see::parse_lexicon_text("# comment only\n\n").records.empty());
}

TEST_CASE("parse_lexicon rejects malformed input with a line number") {
    CHECK_THROWS_WITH_AS(see::parse_lexicon_text("chair\tchair\n"),
                         doctest::Contains("line 1"), std::runtime_error);
    // a sense with an empty sememe
    CHECK_THROWS_WITH_AS(see::parse_lexicon_text("ok\t-\ta|b\nbad\t-\ta||b\n"),
                         doctest::Contains("line 2"), std::runtime_error);
    CHECK_THROWS_WITH_AS(see::parse_lexicon_text("bad\t-\ta;;b\n"),
                         doctest::Contains("line 1"), std::runtime_error);
    CHECK_THROWS_WITH_AS(see::parse_lexicon_text("bad\t-\t\n"),
                         doctest::Contains("line 1"), std::runtime_error);
}

TEST_CASE("parse_lexicon rejects duplicate words by name") {
    CHECK_THROWS_WITH_AS(see::parse_lexicon_text("dog\t-\ta\ndog\t-\tb\n"),
                         doctest::Contains("dog"), std::runtime_error);
}

TEST_CASE("lexicon round trip through serialize_lexicon") {
    std::mt19937_64 rng(5);
    const Lexicon lex = random_lexicon(rng, 25);
    const Lexicon again = see::parse_lexicon_text(see::serialize_lexicon(lex));
    CHECK(lex == again);

    const Lexicon t1 = table1_lexicon();
    CHECK(see::parse_lexicon_text(see::serialize_lexicon(t1)) == t1);
}

TEST_CASE("segment_morphemes prefers the table and falls back to affix stripping") {
    see::MorphTable table{{"unfriendly", {"un", "friend", "ly"}},
                          {"unkindly", {"un", "kind", "ly"}}};
    CHECK(see::segment_morphemes("unfriendly", &table) ==
          std::vector<std::string>{"un", "friend", "ly"});
    CHECK(see::segment_morphemes("unkindly", &table) ==
          std::vector<std::string>{"un", "kind", "ly"});

    // fallback paths
    CHECK(see::segment_morphemes("cat") == std::vector<std::string>{"cat"});
    CHECK(see::segment_morphemes("unfriendly") ==
          std::vector<std::string>{"un", "friend", "ly"});
    CHECK(see::segment_morphemes("unkindly") ==
          std::vector<std::string>{"un", "kind", "ly"});
    CHECK_THROWS_AS(see::segment_morphemes(""), std::invalid_argument);
}

TEST_CASE("build_unit_vocab assigns dense first-appearance ids") {
    SUBCASE("two sememes and one morpheme") {
        const Lexicon lex = see::parse_lexicon_text("x\tx\ta|b\n");
        const UnitVocab vocab = see::build_unit_vocab(lex);
        CHECK(vocab.size() == 5);  // pad, zero, x, a, b
        CHECK(vocab.morpheme_count() == 1);
        CHECK(vocab.sememe_count() == 2);
    }
    SUBCASE("the chair record alone") {
        const Lexicon lex = see::parse_lexicon_text(std::string(kChairLine) + "\n");
        const UnitVocab vocab = see::build_unit_vocab(lex);
        CHECK(vocab.morpheme_count() == 1);
        CHECK(vocab.sememe_count() == 5);
        CHECK(vocab.size() == 8);
        CHECK(vocab.units[UnitVocab::kPadId].kind == see::UnitKind::reserved);
        CHECK(vocab.units[UnitVocab::kZeroId].kind == see::UnitKind::reserved);
        CHECK(vocab.morpheme_id("chair") == 2);
        CHECK(vocab.sememe_id("ComeTogether") == 3);
        CHECK(vocab.sememe_id("sit") == 7);
    }
    SUBCASE("empty lexicon keeps only the reserved units") {
        CHECK(see::build_unit_vocab(Lexicon{}).size() == 2);
    }
    SUBCASE("a string used in both roles gets two ids") {
        const Lexicon lex = see::parse_lexicon_text("sit\tsit\tsit|rest\n");
        const UnitVocab vocab = see::build_unit_vocab(lex);
        CHECK(vocab.size() == 5);
        CHECK(vocab.morpheme_id("sit") != vocab.sememe_id("sit"));
    }
}

TEST_CASE("compile_grid lays out morphemes, senses, padding and zero rows") {
    const Lexicon lex = table1_lexicon();
    const UnitVocab vocab = see::build_unit_vocab(lex);

    SUBCASE("chair at r=5, o=3") {
        const IndexGrid grid = see::compile_grid(lex.records[0], vocab, 5, 3);
        CHECK(grid.at(0, 0) == vocab.morpheme_id("chair"));
        CHECK(grid.at(0, 1) == UnitVocab::kPadId);
        CHECK(grid.at(0, 2) == UnitVocab::kPadId);
        CHECK(grid.at(1, 0) == vocab.sememe_id("ComeTogether"));
        CHECK(grid.at(1, 1) == vocab.sememe_id("manage"));
        CHECK(grid.at(1, 2) == vocab.sememe_id("fact"));
        CHECK(grid.at(2, 0) == vocab.sememe_id("furniture"));
        CHECK(grid.at(2, 1) == vocab.sememe_id("sit"));
        CHECK(grid.at(2, 2) == UnitVocab::kPadId);
        for (int j = 3; j < 5; ++j)
            for (int k = 0; k < 3; ++k) CHECK(grid.at(j, k) == UnitVocab::kZeroId);
    }
    SUBCASE("power keeps only its first four senses at r=5") {
        const auto& power = lex.records[1];
        REQUIRE(power.senses.size() == 5);
        const IndexGrid grid = see::compile_grid(power, vocab, 5, 3);
        CHECK(grid.at(4, 0) == vocab.sememe_id("country"));  // 4th sense, not the 5th
        CHECK(grid.at(4, 2) == vocab.sememe_id("politics"));
        for (std::uint32_t id : grid.ids) CHECK(id != vocab.sememe_id("machine"));
    }
    SUBCASE("morphemes beyond the order are truncated") {
        const Lexicon many = see::parse_lexicon_text("abcd\ta,b,c,d\tp|q\n");
        const UnitVocab v = see::build_unit_vocab(many);
        const IndexGrid grid = see::compile_grid(many.records[0], v, 2, 2);
        CHECK(grid.at(0, 0) == v.morpheme_id("a"));
        CHECK(grid.at(0, 1) == v.morpheme_id("b"));
        for (std::uint32_t id : grid.ids) {
            CHECK(id != v.morpheme_id("c"));
            CHECK(id != v.morpheme_id("d"));
        }
    }
    SUBCASE("exact fit produces no pad or zero ids") {
        const Lexicon fit = see::parse_lexicon_text("ab\ta,b\tp|q;r|t\n");
        const UnitVocab v = see::build_unit_vocab(fit);
        const IndexGrid grid = see::compile_grid(fit.records[0], v, 3, 2);
        for (std::uint32_t id : grid.ids) {
            CHECK(id != UnitVocab::kPadId);
            CHECK(id != UnitVocab::kZeroId);
        }
    }
    SUBCASE("unknown units are reported by name") {
        const Lexicon other = see::parse_lexicon_text("zzz\tzzz\tqqq\n");
        CHECK_THROWS_WITH_AS(see::compile_grid(other.records[0], vocab, 3, 2),
                             doctest::Contains("zzz"), std::runtime_error);
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(see::compile_grid(lex.records[0], vocab, 1, 3),
                        std::invalid_argument);
        CHECK_THROWS_AS(see::compile_grid(lex.records[0], vocab, 2, 0),
                        std::invalid_argument);
    }
}

TEST_CASE("compile_grid is deterministic and rank extension only appends zero rows") {
    std::mt19937_64 rng(9);
    const Lexicon lex = random_lexicon(rng, 30);
    const UnitVocab vocab = see::build_unit_vocab(lex);

    for (const auto& rec : lex.records) {
        const int o = 1 + static_cast<int>(rng() % 4);
        const int r = 2 + static_cast<int>(rng() % 5);
        const IndexGrid a = see::compile_grid(rec, vocab, r, o);
        const IndexGrid b = see::compile_grid(rec, vocab, r, o);
        CHECK(a == b);

        // every id in range; row kinds respected
        for (int k = 0; k < o; ++k) {
            const auto id = a.at(0, k);
            CHECK(id < vocab.size());
            const bool morph_or_pad =
                id == UnitVocab::kPadId || vocab.units[id].kind == see::UnitKind::morpheme;
            CHECK(morph_or_pad);
        }
        for (int j = 1; j < r; ++j) {
            bool any_zero = false, all_zero = true;
            for (int k = 0; k < o; ++k) {
                const auto id = a.at(j, k);
                CHECK(id < vocab.size());
                const bool ok = id == UnitVocab::kPadId || id == UnitVocab::kZeroId ||
                                vocab.units[id].kind == see::UnitKind::sememe;
                CHECK(ok);
                any_zero |= id == UnitVocab::kZeroId;
                all_zero &= id == UnitVocab::kZeroId;
            }
            CHECK(any_zero == all_zero);  // absent senses are entirely zero rows
        }

        if (rec.senses.size() < static_cast<std::size_t>(r - 1)) {
            const IndexGrid wider = see::compile_grid(rec, vocab, r + 1, o);
            for (int j = 0; j < r; ++j)
                for (int k = 0; k < o; ++k) CHECK(wider.at(j, k) == a.at(j, k));
            for (int k = 0; k < o; ++k) CHECK(wider.at(r, k) == UnitVocab::kZeroId);
        }
    }
}

TEST_CASE("compile_table handles OOV tokens and collects stats") {
    const Lexicon lex = table1_lexicon();
    const UnitVocab vocab = see::build_unit_vocab(lex);

    SUBCASE("single known token") {
        const auto table = see::compile_table(lex, {"chair"}, vocab, 5, 3);
        CHECK(table.grids.size() == 1);
        CHECK(table.stats.oov == 0);
        CHECK(table.word_ids.at("chair") == 0);
    }
    SUBCASE("OOV token gets all-zero sense rows") {
        const auto table = see::compile_table(lex, {"chair", "zzzqx"}, vocab, 5, 3);
        REQUIRE(table.grids.size() == 2);
        const IndexGrid& grid = table.grids[1];
        for (int j = 1; j < 5; ++j)
            for (int k = 0; k < 3; ++k) CHECK(grid.at(j, k) == UnitVocab::kZeroId);
        CHECK(table.oov[1] == 1);
        CHECK(table.stats.oov_fraction == doctest::Approx(0.5));
    }
    SUBCASE("all-OOV table reports fraction 1") {
        const auto table = see::compile_table(lex, {"aaa", "bbb"}, vocab, 3, 2);
        CHECK(see::coverage_stats(table).oov_fraction == 1.0);
    }
    SUBCASE("exact-fit-only table has pad fill rate 0") {
        const Lexicon fit = see::parse_lexicon_text("ab\ta,b\tp|q;r|t\n");
        const auto table =
            see::compile_table(fit, {"ab"}, see::build_unit_vocab(fit), 3, 2);
        CHECK(see::coverage_stats(table).pad_fill_rate == 0.0);
    }
    SUBCASE("the two-word table-1 lexicon truncates one sense at r=5") {
        const auto table = see::compile_table(lex, {"chair", "power"}, vocab, 5, 3);
        const auto stats = see::coverage_stats(table);
        CHECK(stats.truncated_senses == 1);
        CHECK(stats.mean_senses == doctest::Approx(3.5));
    }
    SUBCASE("duplicate tokens are rejected") {
        CHECK_THROWS_AS(see::compile_table(lex, {"chair", "chair"}, vocab, 5, 3),
                        std::invalid_argument);
    }
    SUBCASE("empty token list is rejected") {
        CHECK_THROWS_AS(see::compile_table(lex, {}, vocab, 5, 3), std::invalid_argument);
    }
}

TEST_CASE("grid table round trips through the binary format byte-identically") {
    std::mt19937_64 rng(21);
    const Lexicon lex = random_lexicon(rng, 40);
    const UnitVocab vocab = see::build_unit_vocab(lex);
    std::vector<std::string> tokens;
    for (const auto& rec : lex.records) tokens.push_back(rec.word);
    tokens.push_back("outofvocab");
    const auto table = see::compile_table(lex, tokens, vocab, 4, 3);

    std::ostringstream first, second;
    see::write_grid_table(first, table);
    see::write_grid_table(second, table);
    CHECK(first.str() == second.str());

    std::istringstream in(first.str());
    const auto loaded = see::read_grid_table(in);
    CHECK(loaded.rank == table.rank);
    CHECK(loaded.order == table.order);
    CHECK(loaded.tokens == table.tokens);
    CHECK(loaded.grids == table.grids);
    CHECK(loaded.oov == table.oov);
    CHECK(loaded.vocab == table.vocab);
    CHECK(loaded.stats == table.stats);

    std::ostringstream rewritten;
    see::write_grid_table(rewritten, loaded);
    CHECK(rewritten.str() == first.str());
}

TEST_CASE("morph table parsing and affix files") {
    std::istringstream in("unfriendly\tun,friend,ly\n# comment\nredo\tre,do\n");
    const auto table = see::parse_morph_table(in);
    CHECK(table.size() == 2);
    CHECK(table.at("redo") == std::vector<std::string>{"re", "do"});

    std::istringstream bad("oops\n");
    CHECK_THROWS_AS(see::parse_morph_table(bad), std::runtime_error);
}
