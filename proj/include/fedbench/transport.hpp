#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "fedbench/bytes.hpp"

namespace fedbench::net {

enum class Role : uint8_t { A = 1, B = 2, C = 3, Server = 4, Client = 5 };

struct PartyId {
  Role role = Role::A;
  uint8_t instance = 0;

  uint16_t packed() const { return static_cast<uint16_t>(static_cast<uint16_t>(role) << 8 | instance); }
  static PartyId unpack(uint16_t v, size_t offset);
  auto operator<=>(const PartyId&) const = default;
  std::string str() const;
};

inline PartyId party_a() { return {Role::A, 0}; }
inline PartyId party_b() { return {Role::B, 0}; }
inline PartyId party_c() { return {Role::C, 0}; }
inline PartyId server() { return {Role::Server, 0}; }
inline PartyId client(uint8_t k) { return {Role::Client, k}; }

// Registered payload kinds. Wire ids are fixed; renumbering breaks stored
// transcripts.
enum class Kind : uint16_t {
  PkDistribution = 1,
  VflUaBatch = 2,
  VflLossA = 3,
  VflDBatch = 4,
  VflLossTotal = 5,
  VflMaskedGrad = 6,
  VflGradReply = 7,
  VflStop = 8,
  VflPredictRequest = 9,
  VflPredictShare = 10,
  PsiBlindedBatch = 11,
  PsiIntersection = 12,
  HflMaskedUpdate = 13,
  HflBroadcast = 14,
  HflStop = 15,
};

const char* kind_name(Kind k);
bool kind_registered(uint16_t v);

struct MessageEnvelope {
  uint32_t round = 0;
  uint32_t step = 0;
  PartyId sender;
  PartyId receiver;
  Kind kind = Kind::PkDistribution;
  Bytes payload;
};

// Layout: 4B round | 4B step | 2B sender | 2B receiver | 2B kind | 4B len |
// payload, all big-endian.
Bytes serialize(const MessageEnvelope& m);
MessageEnvelope deserialize_envelope(const Bytes& data);

struct Transcript {
  uint64_t run_seed = 0;
  std::vector<MessageEnvelope> messages;

  size_t total_bytes() const;
  // One hex record per line, prefixed with a monotonic index.
  std::string dump() const;
  static Transcript parse(const std::string& text);
};

// In-memory message bus. Sends are recorded into the transcript in order;
// each receiver drains one FIFO, which preserves per-(sender, receiver)
// order. Safe for concurrent senders.
class Bus {
 public:
  explicit Bus(uint64_t run_seed = 0) { transcript_.run_seed = run_seed; }

  void register_party(PartyId id);
  bool registered(PartyId id) const;
  void send(MessageEnvelope msg);
  std::vector<MessageEnvelope> deliver(PartyId receiver);
  bool idle() const;

  const Transcript& transcript() const { return transcript_; }

 private:
  mutable std::mutex mu_;
  std::map<PartyId, std::deque<MessageEnvelope>> queues_;
  Transcript transcript_;
};

// A protocol participant: a deterministic state machine fed by envelopes.
class Party {
 public:
  virtual ~Party() = default;
  virtual PartyId id() const = 0;
  // Called once before any delivery; initial sends go here.
  virtual void start(Bus&) {}
  virtual void handle(const MessageEnvelope& msg, Bus& bus) = 0;
  virtual bool terminal() const = 0;
  virtual std::string phase_name() const = 0;
};

// Round-robin runner: repeatedly delivers pending messages until every
// party reports a terminal phase. Throws ProtocolError with each party's
// phase when max_steps transitions pass without completion.
void run_protocol(std::vector<Party*> parties, Bus& bus, size_t max_steps = 1u << 20);

// Feed recorded messages to fresh party states in recorded order. Outbound
// traffic is routed to a sink, so the replay depends only on the
// transcript and the parties' construction-time seeds.
void replay(const Transcript& transcript, std::vector<Party*> parties);

}  // namespace fedbench::net
