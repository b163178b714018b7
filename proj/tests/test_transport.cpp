#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fedbench/errors.hpp"
#include "fedbench/transport.hpp"

using namespace fedbench;
using namespace fedbench::net;

namespace {

MessageEnvelope sample_msg(uint32_t round, Kind kind, Bytes payload) {
  return MessageEnvelope{round, 1, party_a(), party_c(), kind, std::move(payload)};
}

// Minimal party that counts messages and stops after a quota.
class Counter : public Party {
 public:
  Counter(PartyId id, int quota) : id_(id), quota_(quota) {}
  PartyId id() const override { return id_; }
  void handle(const MessageEnvelope&, Bus&) override { ++seen_; }
  bool terminal() const override { return seen_ >= quota_; }
  std::string phase_name() const override { return "seen-" + std::to_string(seen_); }
  int seen() const { return seen_; }

 private:
  PartyId id_;
  int quota_;
  int seen_ = 0;
};

}  // namespace

TEST_CASE("send then deliver returns the same envelope bytes") {
  Bus bus;
  bus.register_party(party_c());
  MessageEnvelope m = sample_msg(3, Kind::VflLossTotal, {1, 2, 3});
  bus.send(m);
  auto got = bus.deliver(party_c());
  REQUIRE(got.size() == 1);
  CHECK(serialize(got[0]) == serialize(m));
}

TEST_CASE("two sends to the same receiver preserve order") {
  Bus bus;
  bus.register_party(party_c());
  bus.send(sample_msg(1, Kind::VflLossTotal, {1}));
  bus.send(sample_msg(2, Kind::VflLossTotal, {2}));
  auto got = bus.deliver(party_c());
  REQUIRE(got.size() == 2);
  CHECK(got[0].round == 1);
  CHECK(got[1].round == 2);
}

TEST_CASE("delivery on an empty queue is empty") {
  Bus bus;
  bus.register_party(party_a());
  CHECK(bus.deliver(party_a()).empty());
}

TEST_CASE("sending to an unregistered receiver is a routing error") {
  Bus bus;
  CHECK_THROWS_AS(bus.send(sample_msg(0, Kind::VflStop, {})), ProtocolError);
}

TEST_CASE("envelope roundtrips for every registered kind") {
  for (uint16_t k = 1; k <= 15; ++k) {
    REQUIRE(kind_registered(k));
    MessageEnvelope m{7, 2, client(3), server(), static_cast<Kind>(k), {0xde, 0xad}};
    MessageEnvelope back = deserialize_envelope(serialize(m));
    CHECK(back.round == 7);
    CHECK(back.step == 2);
    CHECK(back.sender == client(3));
    CHECK(back.receiver == server());
    CHECK(back.kind == m.kind);
    CHECK(back.payload == m.payload);
  }
  CHECK(!kind_registered(0));
  CHECK(!kind_registered(16));
}

TEST_CASE("truncated envelope decodes to an error with a byte offset") {
  Bytes data = serialize(sample_msg(1, Kind::VflLossA, {9, 9, 9, 9}));
  for (size_t cut : {3u, 9u, 13u, 17u}) {
    Bytes trunc(data.begin(), data.begin() + cut);
    try {
      deserialize_envelope(trunc);
      FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
      CHECK(e.offset() <= cut);
    }
  }
}

TEST_CASE("unknown kind id is rejected") {
  Bytes data = serialize(sample_msg(1, Kind::VflLossA, {}));
  data[12] = 0xff;  // kind field
  data[13] = 0xff;
  CHECK_THROWS_AS(deserialize_envelope(data), DecodeError);
}

TEST_CASE("roundtrip holds for random payloads") {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 200; ++i) {
    Bytes payload(gen() % 64);
    for (auto& b : payload) b = static_cast<uint8_t>(gen());
    MessageEnvelope m{static_cast<uint32_t>(gen()), static_cast<uint32_t>(gen()),
                      client(static_cast<uint8_t>(gen())), party_b(),
                      static_cast<Kind>(1 + gen() % 15), payload};
    CHECK(serialize(deserialize_envelope(serialize(m))) == serialize(m));
  }
}

TEST_CASE("empty party set terminates immediately with an empty transcript") {
  Bus bus;
  run_protocol({}, bus);
  CHECK(bus.transcript().messages.empty());
}

TEST_CASE("runner reports a deadlock with per-party phases") {
  Counter stuck(party_a(), 1);  // never receives anything
  Bus bus;
  try {
    run_protocol({&stuck}, bus, 10);
    FAIL("expected deadlock");
  } catch (const ProtocolError& e) {
    CHECK(std::string(e.what()).find("seen-0") != std::string::npos);
  }
}

TEST_CASE("transcript dump and parse are inverse") {
  Bus bus(424242);
  bus.register_party(party_c());
  bus.send(sample_msg(1, Kind::VflLossTotal, {1, 2}));
  bus.send(sample_msg(2, Kind::VflMaskedGrad, {}));
  Transcript t = bus.transcript();
  Transcript back = Transcript::parse(t.dump());
  CHECK(back.run_seed == 424242);
  REQUIRE(back.messages.size() == 2);
  CHECK(serialize(back.messages[0]) == serialize(t.messages[0]));
  CHECK(serialize(back.messages[1]) == serialize(t.messages[1]));
  CHECK(back.total_bytes() == t.total_bytes());
}
