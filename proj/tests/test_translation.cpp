#include <gtest/gtest.h>

#include <cstdlib>
#include <random>
#include <thread>

#include "support.hpp"
#include "tutor/error.hpp"
#include "tutor/translation.hpp"

using namespace tutor;

namespace {

const std::filesystem::path kFixtures = TUTOR_FIXTURE_DIR;

GlossaryBackend fixture_glossary() {
  const auto file = load_glossary(kFixtures / "glossary.tsv");
  return GlossaryBackend(file.entries, file.pairs);
}

// Counts backend calls and otherwise behaves like the wrapped backend.
class CountingBackend final : public TranslatorBackend {
 public:
  explicit CountingBackend(TranslatorBackend& inner) : inner_(inner) {}
  std::string_view name() const override { return "counting"; }
  std::optional<std::set<LanguagePair>> capability() const override { return inner_.capability(); }
  std::string translate(const TranslationRequest& r) override {
    ++calls;
    return inner_.translate(r);
  }
  std::atomic<int> calls{0};

 private:
  TranslatorBackend& inner_;
};

std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces{"book", "hello", "machine", "translation", "the", " ", "  ", "\t",
                                               "\n", "کتاب", "é", "fraction", "What", "is", "7", "x", "machine translation"};
  std::string s;
  const int n = static_cast<int>(rng() % 12);
  for (int i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
  return s;
}

}  // namespace

TEST(Translate, IdentityFastPathSkipsBackend) {
  auto glossary = fixture_glossary();
  CountingBackend counting(glossary);
  EXPECT_EQ(translate(counting, {"en", "en", "hello"}), "hello");
  EXPECT_EQ(counting.calls, 0);
}

TEST(Translate, GlossaryFixtureLookups) {
  auto g = fixture_glossary();
  EXPECT_EQ(translate(g, {"en", "fa", "book"}), "کتاب");
  EXPECT_EQ(translate(g, {"en", "fa", "the book"}), "the کتاب");
  EXPECT_EQ(translate(g, {"en", "fa", "machine translation"}), "ترجمه ماشینی");
  EXPECT_EQ(translate(g, {"en", "fa", "a machine  is\tnot machine translation"}), "a ماشین  is\tnot ترجمه ماشینی");
  EXPECT_EQ(translate(g, {"en", "es", "hello book"}), "hola libro");
  // Declared pair without terms: passes through.
  EXPECT_EQ(translate(g, {"fa", "es", "کتاب"}), "کتاب");
}

TEST(Translate, UnsupportedPairAndInvalidRequests) {
  auto g = fixture_glossary();
  try {
    translate(g, {"en", "xx", "book"});
    FAIL();
  } catch (const TutorError& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedPair);
  }
  try {
    translate(g, {"EN", "fa", "book"});
    FAIL();
  } catch (const TutorError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidLanguage);
  }
  try {
    translate(g, {"en", "fa", std::string(11, 'a')}, 10);
    FAIL();
  } catch (const TutorError& e) {
    EXPECT_EQ(e.code(), ErrorCode::TextTooLong);
  }
  // Length counts code points, not bytes.
  EXPECT_NO_THROW(translate(g, {"fa", "fa", "کتابکتاب"}, 8));
  EXPECT_EQ(utf8_length("کتاب"), 4u);
}

TEST(PairCount, DirectedPairs) {
  std::set<std::string> langs;
  EXPECT_EQ(pair_count(langs), 0u);
  langs.insert("en");
  EXPECT_EQ(pair_count(langs), 0u);
  langs.insert("fa");
  EXPECT_EQ(pair_count(langs), 2u);
  langs.clear();
  for (char a = 'a'; langs.size() < 64; ++a) {
    for (char b = 'a'; b <= 'z' && langs.size() < 64; ++b) langs.insert(std::string{a, b});
  }
  EXPECT_EQ(pair_count(langs), 4032u);
  for (std::uint64_t n = 0; n < 100; ++n) {
    std::set<std::string> s;
    for (std::uint64_t i = 0; i < n; ++i) s.insert("l" + std::to_string(i));
    ASSERT_EQ(pair_count(s), n * n - n);
  }
}

TEST(Translate, IdentityLawOverRandomStrings) {
  std::mt19937_64 rng(4);
  auto g = fixture_glossary();
  IdentityBackend id;
  for (int i = 0; i < 1000; ++i) {
    std::string text;
    const int n = static_cast<int>(rng() % 40);
    for (int k = 0; k < n; ++k) text.push_back(static_cast<char>(32 + rng() % 95));
    if (rng() % 3 == 0) text += "کتاب \n";
    const std::string lang = i % 2 ? "fa" : "en";
    ASSERT_EQ(translate(g, {lang, lang, text}), text);
    ASSERT_EQ(translate(id, {lang, lang, text}), text);
  }
}

TEST(Cache, HitsSkipBackendAndKeyIncludesTarget) {
  auto g = fixture_glossary();
  CountingBackend counting(g);
  TranslationCache cache(100);
  EXPECT_EQ(cached_translate(cache, counting, {"en", "fa", "book"}), "کتاب");
  EXPECT_EQ(cached_translate(cache, counting, {"en", "fa", "book"}), "کتاب");
  EXPECT_EQ(counting.calls, 1);
  EXPECT_EQ(cached_translate(cache, counting, {"en", "es", "book"}), "libro");
  EXPECT_EQ(counting.calls, 2);
}

TEST(Cache, LeastRecentlyUsedEviction) {
  auto g = fixture_glossary();
  CountingBackend counting(g);
  TranslationCache cache(2);
  cached_translate(cache, counting, {"en", "fa", "a"});
  cached_translate(cache, counting, {"en", "fa", "b"});
  cached_translate(cache, counting, {"en", "fa", "a"});  // refresh a
  cached_translate(cache, counting, {"en", "fa", "c"});  // evicts b
  EXPECT_EQ(cache.size(), 2u);
  EXPECT_EQ(counting.calls, 3);
  cached_translate(cache, counting, {"en", "fa", "a"});
  EXPECT_EQ(counting.calls, 3);
  cached_translate(cache, counting, {"en", "fa", "b"});
  EXPECT_EQ(counting.calls, 4);
}

TEST(Cache, TransparentOnRandomStreams) {
  std::mt19937_64 rng(12);
  auto g = fixture_glossary();
  const std::vector<LanguagePair> pairs{{"en", "fa"}, {"en", "es"}, {"fa", "en"}, {"en", "en"}, {"en", "xx"}};
  for (std::size_t capacity : {1u, 3u, 50u}) {
    TranslationCache cache(capacity);
    for (int i = 0; i < 2000; ++i) {
      const auto& p = pairs[rng() % pairs.size()];
      const TranslationRequest r{p.source, p.target, random_text(rng)};
      std::optional<std::string> want, got;
      std::optional<ErrorCode> want_error, got_error;
      try {
        want = translate(g, r);
      } catch (const TutorError& e) {
        want_error = e.code();
      }
      try {
        got = cached_translate(cache, g, r);
      } catch (const TutorError& e) {
        got_error = e.code();
      }
      ASSERT_EQ(got, want);
      ASSERT_EQ(got_error, want_error);
      ASSERT_LE(cache.size(), capacity);
    }
  }
}

TEST(Cache, ConcurrentUseIsConsistent) {
  auto g = fixture_glossary();
  TranslationCache cache(16);
  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      std::mt19937_64 rng(static_cast<unsigned>(t));
      for (int i = 0; i < 500; ++i) {
        const TranslationRequest r{"en", "fa", random_text(rng)};
        if (cached_translate(cache, g, r) != translate(g, r)) ++mismatches;
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(mismatches, 0);
}

TEST(Glossary, ParsingAndCapability) {
  const auto file = parse_glossary("# comment\n\nen\tfa\tbook\tکتاب\nde\tfr\n");
  ASSERT_EQ(file.entries.size(), 1u);
  GlossaryBackend g(file.entries, file.pairs);
  EXPECT_TRUE(g.supports("en", "fa"));
  EXPECT_TRUE(g.supports("de", "fr"));
  EXPECT_FALSE(g.supports("fa", "en"));
  EXPECT_EQ(g.languages(), (std::set<std::string>{"de", "en", "fa", "fr"}));
  EXPECT_THROW(parse_glossary("en\tfa\tonly-three\n"), TutorError);
}

TEST(BackendFromEnv, SelectsBackend) {
  ::setenv("TRANSLATOR_BACKEND", "glossary", 1);
  ::setenv("GLOSSARY_PATH", (kFixtures / "glossary.tsv").c_str(), 1);
  auto b = backend_from_env();
  EXPECT_EQ(b->name(), "glossary");
  EXPECT_EQ(translate(*b, {"en", "fa", "book"}), "کتاب");
  ::setenv("TRANSLATOR_BACKEND", "identity", 1);
  EXPECT_EQ(backend_from_env()->name(), "identity");
  ::setenv("TRANSLATOR_BACKEND", "carrier-pigeon", 1);
  EXPECT_THROW(backend_from_env(), TutorError);
  ::unsetenv("TRANSLATOR_BACKEND");
  EXPECT_EQ(backend_from_env()->name(), "identity");
}
