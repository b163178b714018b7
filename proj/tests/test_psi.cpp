#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <unordered_set>

#include "fedbench/errors.hpp"
#include "fedbench/psi.hpp"
#include "fedbench/rng.hpp"

using namespace fedbench;
using namespace fedbench::psi;

namespace {

// Plaintext oracle: hash-set intersection with row indices, A's order.
std::vector<std::pair<uint32_t, uint32_t>> intersect_oracle(const std::vector<EntityId>& a,
                                                            const std::vector<EntityId>& b) {
  std::unordered_map<std::string, uint32_t> b_index;
  for (uint32_t j = 0; j < b.size(); ++j) b_index.emplace(b[j], j);
  std::vector<std::pair<uint32_t, uint32_t>> out;
  for (uint32_t i = 0; i < a.size(); ++i) {
    auto it = b_index.find(a[i]);
    if (it != b_index.end()) out.emplace_back(i, it->second);
  }
  return out;
}

std::vector<EntityId> random_ids(std::mt19937_64& gen, size_t n, const std::string& prefix) {
  std::set<std::string> unique;
  while (unique.size() < n)
    unique.insert(prefix + std::to_string(gen() % 10'000'000));
  return {unique.begin(), unique.end()};
}

}  // namespace

TEST_CASE("test group is a safe prime with a prime-order subgroup") {
  const Group& g = Group::test();
  CHECK(mpz_probab_prime_p(g.prime.get_mpz_t(), 40) != 0);
  CHECK(mpz_probab_prime_p(g.subgroup_order.get_mpz_t(), 40) != 0);
  CHECK(g.prime == 2 * g.subgroup_order + 1);
  CHECK(mpz_sizeinbase(Group::production().prime.get_mpz_t(), 2) == 2048);
}

TEST_CASE("hash_to_group is deterministic and lands in the subgroup") {
  const Group& g = Group::test();
  CHECK(hash_to_group("u1", g) == hash_to_group("u1", g));
  CHECK(hash_to_group("u1", g) != hash_to_group("u2", g));
  // subgroup membership: e^q == 1 mod p
  for (const char* id : {"u1", "u2", "some-longer-identifier"}) {
    mpz_class e = hash_to_group(id, g);
    mpz_class r;
    mpz_powm(r.get_mpz_t(), e.get_mpz_t(), g.subgroup_order.get_mpz_t(), g.prime.get_mpz_t());
    CHECK(r == 1);
  }
}

TEST_CASE("blinding basics") {
  const Group& g = Group::test();
  mpz_class e = hash_to_group("entity", g);
  CHECK(blind(e, 1, g) == e);
  CHECK(blind(mpz_class(1), 12345, g) == 1);
  CHECK_THROWS_AS(blind(e, 0, g), InvalidParameterError);
  CHECK_THROWS_AS(blind(e, g.subgroup_order, g), InvalidParameterError);
}

TEST_CASE("blinding commutes") {
  const Group& g = Group::test();
  BigRng rng(17);
  for (int i = 0; i < 100; ++i) {
    mpz_class e = hash_to_group("id-" + std::to_string(i), g);
    mpz_class a = 2 + rng.below(g.subgroup_order - 3);
    mpz_class b = 2 + rng.below(g.subgroup_order - 3);
    CHECK(blind(blind(e, a, g), b, g) == blind(blind(e, b, g), a, g));
  }
}

TEST_CASE("alignment matches the plain intersection on the worked example") {
  auto out = align({"u1", "u2", "u3"}, {"u2", "u3", "u4"}, 7, Group::test());
  CHECK(out.result.common_count == 2);
  REQUIRE(out.result.pairs.size() == 2);
  CHECK(out.result.pairs[0] == std::pair<uint32_t, uint32_t>{1, 0});  // u2
  CHECK(out.result.pairs[1] == std::pair<uint32_t, uint32_t>{2, 1});  // u3
}

TEST_CASE("empty side aligns to an empty intersection") {
  auto out = align({}, {"u1"}, 7, Group::test());
  CHECK(out.result.common_count == 0);
  CHECK(out.result.pairs.empty());
}

TEST_CASE("duplicate ids within one party are rejected") {
  CHECK_THROWS_AS(align({"u1", "u1"}, {"u2"}, 7, Group::test()), InvalidDatasetError);
  CHECK_THROWS_AS(align({"u1"}, {"u2", "u2"}, 7, Group::test()), InvalidDatasetError);
}

TEST_CASE("200 ids per side with 50 forced common equal the oracle") {
  std::mt19937_64 gen(23);
  std::vector<EntityId> common = random_ids(gen, 50, "common-");
  std::vector<EntityId> only_a = random_ids(gen, 150, "left-");
  std::vector<EntityId> only_b = random_ids(gen, 150, "right-");

  std::vector<EntityId> a = only_a;
  a.insert(a.end(), common.begin(), common.end());
  std::vector<EntityId> b = only_b;
  b.insert(b.end(), common.begin(), common.end());
  std::shuffle(a.begin(), a.end(), gen);
  std::shuffle(b.begin(), b.end(), gen);

  auto out = align(a, b, 99, Group::test());
  CHECK(out.result.pairs == intersect_oracle(a, b));
  CHECK(out.result.common_count == 50);
}

TEST_CASE("permuting inputs changes indices but not the matched id set") {
  std::mt19937_64 gen(31);
  std::vector<EntityId> a = random_ids(gen, 40, "pa-");
  std::vector<EntityId> b(a.begin(), a.begin() + 25);
  for (auto more : random_ids(gen, 15, "pb-")) b.push_back(more);

  auto matched_set = [&](const std::vector<EntityId>& xa, const std::vector<EntityId>& xb) {
    auto out = align(xa, xb, 5, Group::test());
    std::set<EntityId> ids;
    for (auto [ia, ib] : out.result.pairs) {
      CHECK(xa[ia] == xb[ib]);
      ids.insert(xa[ia]);
    }
    return ids;
  };

  auto base = matched_set(a, b);
  std::shuffle(a.begin(), a.end(), gen);
  std::shuffle(b.begin(), b.end(), gen);
  CHECK(matched_set(a, b) == base);
}

TEST_CASE("transcripts are deterministic under the seed") {
  std::vector<EntityId> a{"alpha-001", "alpha-002", "alpha-003"};
  std::vector<EntityId> b{"alpha-002", "beta-004"};
  auto t1 = align(a, b, 1234, Group::test()).transcript.dump();
  auto t2 = align(a, b, 1234, Group::test()).transcript.dump();
  auto t3 = align(a, b, 1235, Group::test()).transcript.dump();
  CHECK(t1 == t2);
  CHECK(t1 != t3);
}

TEST_CASE("transcript never carries raw bytes of non-overlapping ids") {
  std::mt19937_64 gen(47);
  std::vector<EntityId> a = random_ids(gen, 30, "secret-a-");
  std::vector<EntityId> b = random_ids(gen, 30, "secret-b-");
  a.push_back("shared-user-1");
  b.push_back("shared-user-1");

  auto out = align(a, b, 321, Group::test());
  CHECK(out.result.common_count == 1);

  std::string wire;
  for (const auto& m : out.transcript.messages) {
    Bytes raw = net::serialize(m);
    wire.append(raw.begin(), raw.end());
  }
  for (const auto& id : a)
    if (id != "shared-user-1") CHECK(wire.find(id) == std::string::npos);
  for (const auto& id : b)
    if (id != "shared-user-1") CHECK(wire.find(id) == std::string::npos);
}

TEST_CASE("production group handles a small alignment") {
  auto out = align({"prod-1", "prod-2"}, {"prod-2", "prod-3"}, 8, Group::production());
  REQUIRE(out.result.pairs.size() == 1);
  CHECK(out.result.pairs[0] == std::pair<uint32_t, uint32_t>{1, 0});
}
