#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "glyphforge/error.hpp"
#include "glyphforge/imaging/png_io.hpp"
#include "glyphforge/random.hpp"
#include "glyphforge/synth/annotations.hpp"
#include "glyphforge/synth/compose.hpp"
#include "glyphforge/synth/corpus.hpp"
#include "glyphforge/synth/dataset.hpp"
#include "glyphforge/synth/lexicon.hpp"
#include "glyphforge/synth/utf8.hpp"
#include "toy.hpp"

namespace fs = std::filesystem;
namespace gs = glyphforge::synth;
namespace gi = glyphforge::imaging;
using glyphforge::Errc;
using glyphforge::Error;
using glyphforge::testing::TempDir;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::InvalidArgument;
}

gs::GlyphCorpus labelled(std::initializer_list<const char*> labels, int size = 8) {
  gs::GlyphCorpus corpus({size, size});
  for (const char* l : labels) corpus.add(l, gi::GrayRaster(size, size, std::vector<double>(size * size, 0.3)));
  return corpus;
}

}  // namespace

TEST(Utf8, RoundTripAndRejects) {
  const std::string text = "a\xC3\xA9\xE0\xA6\x95\xF0\x9F\x98\x80";
  const auto cps = gs::to_codepoints(text);
  ASSERT_EQ(cps.size(), 4u);
  EXPECT_EQ(cps[2], U'ক');
  EXPECT_EQ(gs::to_utf8(cps), text);
  EXPECT_FALSE(gs::decode_utf8("\xC0\xAF"));          // overlong
  EXPECT_FALSE(gs::decode_utf8("\xED\xA0\x80"));      // surrogate
  EXPECT_FALSE(gs::decode_utf8("\xE0\xA6"));          // truncated
  EXPECT_FALSE(gs::decode_utf8("\xFF"));
  EXPECT_EQ(code_of([] { gs::to_codepoints("\x80"); }), Errc::NotUtf8);
}

TEST(Lexicon, TrimsDedupsAndSkipsBlanks) {
  TempDir dir;
  glyphforge::testing::write_lines(dir / "lex.txt", {"ab", "cd", "ab"});
  EXPECT_EQ(gs::load_lexicon(dir / "lex.txt").words, (std::vector<std::string>{"ab", "cd"}));
  EXPECT_EQ(gs::make_lexicon({"  x ", "", "\t", "y", "x"}).words, (std::vector<std::string>{"x", "y"}));
}

TEST(Lexicon, Degenerate) {
  TempDir dir;
  glyphforge::testing::write_lines(dir / "blank.txt", {"", "  ", ""});
  EXPECT_EQ(code_of([&] { gs::load_lexicon(dir / "blank.txt"); }), Errc::EmptyLexicon);
  EXPECT_EQ(code_of([] { gs::make_lexicon({"ok", "\xC3"}); }), Errc::NotUtf8);
}

TEST(Corpus, LoadsLabelDirectories) {
  TempDir dir;
  glyphforge::testing::write_toy_corpus(dir.path(), {"a", "b"}, 2);
  const auto corpus = gs::load_glyph_corpus(dir.path());
  EXPECT_EQ(corpus.label_count(), 2u);
  EXPECT_EQ(corpus.variants("a").size(), 2u);
  EXPECT_EQ(corpus.variants("b").size(), 2u);
  for (const auto& g : corpus.variants("a")) {
    EXPECT_EQ(g.width(), 128);
    EXPECT_EQ(g.height(), 128);
  }
  EXPECT_EQ(code_of([&] { corpus.variants("z"); }), Errc::UnknownLabel);
}

TEST(Corpus, EmptyAndMissing) {
  TempDir dir;
  EXPECT_EQ(code_of([&] { gs::load_glyph_corpus(dir.path()); }), Errc::EmptyCorpus);
  EXPECT_EQ(code_of([&] { gs::load_glyph_corpus(dir / "nope"); }), Errc::MissingDirectory);
}

TEST(Corpus, JsonlIndex) {
  TempDir dir;
  fs::create_directories(dir / "raw");
  gi::write_png(glyphforge::testing::toy_glyph("x", 0), dir / "raw" / "g0.png");
  gi::write_png(glyphforge::testing::toy_glyph("y", 0), dir / "raw" / "g1.png");
  glyphforge::testing::write_lines(dir / "corpus.jsonl", {R"({"path": "raw/g0.png", "label": "x"})",
                                                          R"({"path": "raw/g1.png", "label": "কা"})"});
  const auto corpus = gs::load_glyph_corpus(dir.path(), {{32, 32}, {}});
  EXPECT_TRUE(corpus.contains("x"));
  EXPECT_TRUE(corpus.contains("\xE0\xA6\x95\xE0\xA6\xBE"));
  EXPECT_EQ(corpus.longest_label(), 2u);
}

TEST(Corpus, RejectsWrongGlyphSize) {
  gs::GlyphCorpus corpus({8, 8});
  EXPECT_THROW(corpus.add("a", gi::GrayRaster(7, 8)), Error);
}

TEST(Decompose, LongestMatchWins) {
  EXPECT_EQ(gs::decompose_word("ab", labelled({"a", "b", "ab"})).glyph_labels, (std::vector<std::string>{"ab"}));
  EXPECT_EQ(gs::decompose_word("ab", labelled({"a", "b"})).glyph_labels, (std::vector<std::string>{"a", "b"}));
}

TEST(Decompose, UncoverablePosition) {
  try {
    gs::decompose_word("ax", labelled({"a", "b"}));
    FAIL() << "expected Uncoverable";
  } catch (const gs::UncoverableError& e) {
    EXPECT_EQ(e.code(), Errc::Uncoverable);
    EXPECT_EQ(e.position(), 1u);
  }
}

TEST(Compose, WidthAdditivity) {
  const std::vector<gi::GrayRaster> glyphs(3, gi::GrayRaster(128, 128));
  EXPECT_EQ(gs::compose(glyphs, gs::JoinMode::NonOverlapped, 0).width(), 384);
  EXPECT_EQ(gs::compose(glyphs, gs::JoinMode::Overlapped, gs::kDefaultOverlapPx).width(), 376);
}

TEST(Compose, RenderIsDeterministic) {
  const auto corpus = glyphforge::testing::toy_corpus({"a", "b", "c"}, 4, {32, 32});
  const auto spec = gs::decompose_word("abca", corpus);
  for (auto mode : {gs::JoinMode::NonOverlapped, gs::JoinMode::Overlapped}) {
    const auto one = gs::render_word(spec, corpus, mode, 4, 99);
    const auto two = gs::render_word(spec, corpus, mode, 4, 99);
    EXPECT_EQ(one.image, two.image);
    EXPECT_EQ(one.glyph_variant_ids, two.glyph_variant_ids);
    EXPECT_EQ(one.transcript, "abca");
  }
  EXPECT_EQ(gs::render_word(spec, corpus, gs::JoinMode::NonOverlapped, 4, 1).overlap_px, 0);
}

TEST(Compose, ModeNames) {
  EXPECT_EQ(gs::parse_join_mode("overlapped"), gs::JoinMode::Overlapped);
  EXPECT_EQ(gs::to_string(gs::JoinMode::NonOverlapped), "non_overlapped");
  EXPECT_EQ(code_of([] { gs::parse_join_mode("both"); }), Errc::InvalidArgument);
}

TEST(Dataset, CountCyclesAndFiles) {
  TempDir dir;
  const auto corpus = glyphforge::testing::toy_corpus({"a", "b", "c"}, 2, {32, 32});
  gs::GenerationOptions opt;
  opt.count = 10;
  opt.seed = 5;
  const auto report = gs::generate_dataset(gs::make_lexicon({"ab", "zz", "cab", "ca"}), corpus, opt, dir / "out");
  EXPECT_EQ(report.coverable_words, 3u);
  EXPECT_EQ(report.uncoverable_words, (std::vector<std::string>{"zz"}));
  ASSERT_EQ(report.manifest.records.size(), 10u);
  EXPECT_EQ(report.manifest.records[3].transcript, "ab");
  std::size_t pngs = 0;
  for (const auto& e : fs::directory_iterator(dir / "out" / "images")) pngs += e.path().extension() == ".png";
  EXPECT_EQ(pngs, 10u);
  EXPECT_EQ(report.manifest.alphabet, (std::vector<char32_t>{U'a', U'b', U'c'}));

  const auto back = gs::read_manifest(dir / "out");
  EXPECT_EQ(back.records, report.manifest.records);
  EXPECT_EQ(back.alphabet, report.manifest.alphabet);
  EXPECT_EQ(gs::read_grapheme_labels(dir / "out" / "manifest.jsonl"), (std::vector<std::string>{"a", "b", "c"}));
  const auto img = gi::read_png_gray(gs::resolve_image(back, back.records[0]));
  EXPECT_EQ(img.height(), 32);
  EXPECT_EQ(img.width(), 64);
}

TEST(Dataset, SameSeedSameBytes) {
  TempDir dir;
  const auto corpus = glyphforge::testing::toy_corpus({"a", "b", "c"}, 3, {32, 32});
  const auto lex = gs::make_lexicon({"abc", "cab", "bb"});
  gs::GenerationOptions opt;
  opt.mode = gs::JoinMode::Overlapped;
  opt.count = 7;
  opt.seed = 123;
  gs::generate_dataset(lex, corpus, opt, dir / "one");
  gs::generate_dataset(lex, corpus, opt, dir / "two");
  using glyphforge::testing::read_file;
  EXPECT_EQ(read_file(dir / "one" / "manifest.jsonl"), read_file(dir / "two" / "manifest.jsonl"));
  for (int i = 0; i < 7; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "images/%06d.png", i);
    EXPECT_EQ(read_file(dir / "one" / name), read_file(dir / "two" / name));
  }
}

TEST(Dataset, NoCoverableWordsLeavesNoOutput) {
  TempDir dir;
  const auto corpus = glyphforge::testing::toy_corpus({"a"}, 1, {16, 16});
  gs::GenerationOptions opt;
  opt.count = 3;
  EXPECT_EQ(code_of([&] { gs::generate_dataset(gs::make_lexicon({"xy"}), corpus, opt, dir / "out"); }),
            Errc::NoCoverableWords);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Dataset, EmptyManifest) {
  TempDir dir;
  glyphforge::testing::write_lines(dir / "manifest.jsonl", {});
  EXPECT_EQ(code_of([&] { gs::read_manifest(dir.path()); }), Errc::EmptyManifest);
}

namespace {

void write_page(const fs::path& path, int w, int h) {
  std::vector<double> px(static_cast<std::size_t>(w) * h, 1.0);
  for (int x = 3; x < 9; ++x) px[static_cast<std::size_t>(4) * w + x] = 0.0;
  gi::write_png(gi::GrayRaster(w, h, px), path);
}

}  // namespace

TEST(Annotations, WholePageBox) {
  TempDir dir;
  write_page(dir / "p.png", 20, 10);
  nlohmann::json doc = nlohmann::json::array();
  doc.push_back({{"page", "p.png"}, {"words", {{{"x", 0}, {"y", 0}, {"w", 20}, {"h", 10}, {"label", "hi"}}}}});
  std::ofstream(dir / "pages.json") << doc.dump();
  const auto words = gs::ingest_annotated_pages(dir / "pages.json", dir.path());
  ASSERT_EQ(words.size(), 1u);
  EXPECT_EQ(words[0].transcript, "hi");
  EXPECT_EQ(words[0].image, gi::tight_crop(gi::read_png_gray(dir / "p.png")));
}

TEST(Annotations, BoxOutOfBoundsAndMalformed) {
  TempDir dir;
  write_page(dir / "p.png", 20, 10);
  nlohmann::json doc = nlohmann::json::array();
  doc.push_back({{"page", "p.png"}, {"words", {{{"x", 5}, {"y", 0}, {"w", 16}, {"h", 10}, {"label", "x"}}}}});
  std::ofstream(dir / "oob.json") << doc.dump();
  EXPECT_EQ(code_of([&] { gs::ingest_annotated_pages(dir / "oob.json", dir.path()); }), Errc::BoxOutOfBounds);

  std::ofstream(dir / "bad.json") << R"([{"page": "p.png", "words": [{"x": 0}]}])";
  EXPECT_EQ(code_of([&] { gs::ingest_annotated_pages(dir / "bad.json", dir.path()); }), Errc::MalformedAnnotation);
}
