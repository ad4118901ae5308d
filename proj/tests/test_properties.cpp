// test_properties.cpp — randomized invariants on a fixed seed

#include <doctest.h>

#include "properties.hpp"

TEST_CASE("randomized invariants")
{
    for (const testing_support::PropertyResult& r : testing_support::run_property_suite(100)) {
        INFO(r.name << ": worst " << r.worst << " over " << r.instances << " instances, bound " << r.bound);
        CHECK(r.instances > 0);
        CHECK(r.pass());
    }
}
