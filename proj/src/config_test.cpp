#include "mist/config.hpp"

#include <doctest.h>

using namespace mist;

TEST_CASE("defaults are the synthetic setting") {
  const MistConfig c;
  CHECK(c.mu == 0.1);
  CHECK(c.eta == 15.5);
  CHECK(c.gamma == 10.0);
  CHECK(c.alpha == 1.0);
  CHECK(c.tau == 0.05);
  CHECK(c.k0 == 15);
  CHECK(c.beta == 0.0);
  CHECK(c.xi == 0.1);
  CHECK(c.batch_size == 250);
  CHECK(c.epochs == 50);
  CHECK(c.lr == 0.002);
  CHECK(c.sampler == SamplerKind::Geodesic);
  CHECK(c.terms.str() == "ABCD");
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("text form round trips") {
  MistConfig c;
  c.set("beta", "0.6");
  c.set("variant", "plain");
  c.set("hidden", "256,128");
  c.set("terms", "bcd");
  c.set("sampler", "euclidean");
  c.set("seed", "18446744073709551615");
  const MistConfig back = MistConfig::parse(c.to_text());
  CHECK(back.to_text() == c.to_text());
  CHECK(back.hash() == c.hash());
  CHECK(back.hidden == std::vector<Index>{256, 128});
  CHECK(back.variant == Variant::PlainNCE);
  CHECK(back.seed == 18446744073709551615ULL);
  MistConfig other = c;
  other.set("tau", "0.06");
  CHECK(other.hash() != c.hash());
}

TEST_CASE("parse skips comments and blank lines") {
  const MistConfig c = MistConfig::parse("# header\n\nk0 = 50  # many\n  epochs=3\n");
  CHECK(c.k0 == 50);
  CHECK(c.epochs == 3);
  CHECK_THROWS_AS(MistConfig::parse("k0 50\n"), ConfigError);
}

TEST_CASE("errors carry the offending key") {
  MistConfig c;
  auto key_of = [](auto&& fn) -> std::string {
    try {
      fn();
    } catch (const ConfigError& e) {
      return e.key;
    }
    return "";
  };
  CHECK(key_of([&] { c.set("bogus", "1"); }) == "bogus");
  CHECK(key_of([&] { c.set("k0", "ten"); }) == "k0");
  CHECK(key_of([&] { c.set("variant", "other"); }) == "variant");
  CHECK(key_of([] {
          MistConfig bad;
          bad.beta = 1.0;
          bad.validate();
        }) == "beta");
  CHECK(key_of([] {
          MistConfig bad;
          bad.alpha = 2.0;
          bad.tau = 3.0;
          bad.validate();
        }) == "tau");
  CHECK(key_of([] {
          MistConfig bad;
          bad.batch_size = 1;
          bad.validate();
        }) == "batch_size");
}

TEST_CASE("term sets") {
  for (const char* ok : {"D", "BC", "BD", "AD", "ABC", "BCD", "ABCD", "a,b,c", "(B, C)"}) {
    CHECK_NOTHROW(TermSet::parse(ok));
  }
  CHECK(TermSet::parse("dcba").str() == "ABCD");
  CHECK_THROWS_AS(TermSet::parse("AB"), ConfigError);
  CHECK_THROWS_AS(TermSet::parse("ABE"), ConfigError);
  CHECK_THROWS_AS(TermSet::parse(""), ConfigError);
}

TEST_CASE("every key is settable from its text form") {
  const std::string text = MistConfig().to_text();
  MistConfig c;
  for (const std::string& k : config_keys()) {
    const auto at = text.find(k + " = ");
    REQUIRE(at != std::string::npos);
    const auto start = at + k.size() + 3;
    CHECK_NOTHROW(c.set(k, text.substr(start, text.find('\n', start) - start)));
  }
  CHECK(c.to_text() == text);
}
