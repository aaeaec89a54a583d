#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "softqd/theory.hpp"

using namespace softqd;

// Reduced-trial smokes; the acceptance binary runs the full counts.

TEST_CASE("bound sandwich holds on sampled populations") {
    PropertyReport rep = check_bound_sandwich(10, 2024);
    CHECK(rep.trials == 10);
    CHECK(rep.failures == 0);
    CHECK(rep.worst_margin >= 0.0);
}

TEST_CASE("adding a solution never hurts") {
    PropertyReport rep = check_monotone_add(25, 11);
    CHECK(rep.trials == 25);
    CHECK(rep.failures == 0);
}

TEST_CASE("raising a quality never hurts") {
    PropertyReport rep = check_monotone_quality(25, 12);
    CHECK(rep.trials == 25);
    CHECK(rep.failures == 0);
}

TEST_CASE("marginal gains diminish") {
    PropertyReport rep = check_submodular(40, 13);
    CHECK(rep.trials == 40);
    CHECK(rep.failures == 0);
}

TEST_CASE("small-bandwidth limit approaches the quality sum") {
    PropertyReport rep = check_limit_equivalence(3, 14);
    CHECK(rep.trials == 3);
    CHECK(rep.failures == 0);
}
