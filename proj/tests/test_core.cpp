#include <doctest.h>

#include <limits>

#include "lingbase/core.hpp"
#include "test_helpers.hpp"

using namespace lingbase;

TEST_CASE("code validators accept the documented shapes") {
  CHECK(is_valid_glottocode("stan1293"));
  CHECK(is_valid_glottocode("ab3d0001"));
  CHECK_FALSE(is_valid_glottocode("STAN1293"));
  CHECK_FALSE(is_valid_glottocode("stan129"));
  CHECK_FALSE(is_valid_glottocode("stan12x3"));
  CHECK_FALSE(is_valid_glottocode(""));

  CHECK(is_valid_iso639_3("kaz"));
  CHECK_FALSE(is_valid_iso639_3("ka"));
  CHECK_FALSE(is_valid_iso639_3("KAZ"));

  CHECK(is_valid_script_code("Latn"));
  CHECK(is_valid_script_code("Cyrl"));
  CHECK_FALSE(is_valid_script_code("latn"));
  CHECK_FALSE(is_valid_script_code("LATN"));
  CHECK_FALSE(is_valid_script_code("Lat"));
}

TEST_CASE("category registry routes prefixes, SC_ before S_") {
  const auto reg = CategoryRegistry::defaults();
  CHECK(reg.classify("SC_ABJAD") == Category::Script);
  CHECK(reg.classify("S_SVO") == Category::Syntactic);
  CHECK(reg.classify("P_NASAL") == Category::Phonological);
  CHECK(reg.classify("INV_CLICK") == Category::Inventory);
  CHECK(reg.classify("M_PLURAL") == Category::Morphological);
  CHECK(reg.classify("X_WHAT") == Category::Other);
}

TEST_CASE("category and resource level parsing") {
  CHECK(parse_category("script") == Category::Script);
  CHECK(parse_category("syntactic") == Category::Syntactic);
  CHECK(parse_category("phonological") == Category::Phonological);
  CHECK(parse_category("inventory") == Category::Inventory);
  CHECK(parse_category("morphological") == Category::Morphological);
  CHECK_FALSE(parse_category("typo").has_value());

  CHECK(parse_resource_level("high") == ResourceLevel::High);
  CHECK(parse_resource_level("medium") == ResourceLevel::Medium);
  CHECK(parse_resource_level("low") == ResourceLevel::Low);
  CHECK(parse_resource_level("unknown") == ResourceLevel::Unknown);
  CHECK(parse_resource_level("") == ResourceLevel::Unknown);
  CHECK_FALSE(parse_resource_level("High").has_value());
}

TEST_CASE("validate_matrix flags each invariant breach") {
  auto good = testutil::make_matrix({"aaaa1111", "bbbb1111"}, {"S_A", "S_B"},
                                    {{1, 0}, {-1, 1}});
  CHECK(validate_matrix(good).empty());

  SUBCASE("binary cell outside {0,1}") {
    good.at(0, 0) = 0.5;
    const auto v = validate_matrix(good);
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().rule == "cell-mode");
  }
  SUBCASE("non-finite cell") {
    good.at(0, 0) = std::numeric_limits<double>::quiet_NaN();
    const auto v = validate_matrix(good);
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().rule == "cell-finite");
  }
  SUBCASE("duplicate language") {
    good.languages[1] = good.languages[0];
    const auto v = validate_matrix(good);
    REQUIRE_FALSE(v.empty());
  }
  SUBCASE("unsorted features") {
    std::swap(good.features[0], good.features[1]);
    std::swap(good.categories[0], good.categories[1]);
    CHECK_FALSE(validate_matrix(good).empty());
  }
  SUBCASE("category list misaligned") {
    good.categories.pop_back();
    const auto v = validate_matrix(good);
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().rule == "category-shape");
  }
  SUBCASE("continuous cell outside [0,1]") {
    good.mode = MatrixMode::Continuous;
    good.at(0, 0) = 1.5;
    const auto v = validate_matrix(good);
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().rule == "cell-range");
  }
}

TEST_CASE("validate_distance_matrix flags asymmetry, diagonal, range") {
  auto d = DistanceMatrix::empty({"aaaa1111", "bbbb1111"});
  d.at(0, 1) = 0.25;
  d.at(1, 0) = 0.25;
  CHECK(validate_distance_matrix(d).empty());

  SUBCASE("asymmetric") {
    d.at(1, 0) = 0.26;
    CHECK_FALSE(validate_distance_matrix(d).empty());
  }
  SUBCASE("nonzero diagonal") {
    d.at(0, 0) = 0.1;
    CHECK_FALSE(validate_distance_matrix(d).empty());
  }
  SUBCASE("out of range") {
    d.at(0, 1) = 1.5;
    d.at(1, 0) = 1.5;
    CHECK_FALSE(validate_distance_matrix(d).empty());
  }
  SUBCASE("undefined off-diagonal pair is fine") {
    d.at(0, 1) = std::nullopt;
    d.at(1, 0) = std::nullopt;
    CHECK(validate_distance_matrix(d).empty());
  }
}
