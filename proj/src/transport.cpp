#include "fedbench/transport.hpp"

#include <sstream>

#include "fedbench/errors.hpp"

namespace fedbench::net {

PartyId PartyId::unpack(uint16_t v, size_t offset) {
  auto role = static_cast<uint8_t>(v >> 8);
  if (role < 1 || role > 5) throw DecodeError("unknown party role " + std::to_string(role), offset);
  return PartyId{static_cast<Role>(role), static_cast<uint8_t>(v & 0xff)};
}

std::string PartyId::str() const {
  switch (role) {
    case Role::A: return "A";
    case Role::B: return "B";
    case Role::C: return "C";
    case Role::Server: return "server";
    case Role::Client: return "client-" + std::to_string(instance);
  }
  return "?";
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::PkDistribution: return "pk-distribution";
    case Kind::VflUaBatch: return "vfl-uA-batch";
    case Kind::VflLossA: return "vfl-lossA";
    case Kind::VflDBatch: return "vfl-d-batch";
    case Kind::VflLossTotal: return "vfl-loss-total";
    case Kind::VflMaskedGrad: return "vfl-masked-grad";
    case Kind::VflGradReply: return "vfl-grad-reply";
    case Kind::VflStop: return "vfl-stop";
    case Kind::VflPredictRequest: return "vfl-predict-request";
    case Kind::VflPredictShare: return "vfl-predict-share";
    case Kind::PsiBlindedBatch: return "psi-blinded-batch";
    case Kind::PsiIntersection: return "psi-intersection";
    case Kind::HflMaskedUpdate: return "hfl-masked-update";
    case Kind::HflBroadcast: return "hfl-broadcast";
    case Kind::HflStop: return "hfl-stop";
  }
  return "unknown";
}

bool kind_registered(uint16_t v) {
  return v >= static_cast<uint16_t>(Kind::PkDistribution) &&
         v <= static_cast<uint16_t>(Kind::HflStop);
}

Bytes serialize(const MessageEnvelope& m) {
  Bytes out;
  put_u32(out, m.round);
  put_u32(out, m.step);
  put_u16(out, m.sender.packed());
  put_u16(out, m.receiver.packed());
  put_u16(out, static_cast<uint16_t>(m.kind));
  put_blob(out, m.payload);
  return out;
}

MessageEnvelope deserialize_envelope(const Bytes& data) {
  ByteReader in(data);
  MessageEnvelope m;
  m.round = in.u32();
  m.step = in.u32();
  size_t sender_off = in.offset();
  m.sender = PartyId::unpack(in.u16(), sender_off);
  size_t receiver_off = in.offset();
  m.receiver = PartyId::unpack(in.u16(), receiver_off);
  size_t kind_off = in.offset();
  uint16_t kind = in.u16();
  if (!kind_registered(kind))
    throw DecodeError("unknown payload kind " + std::to_string(kind), kind_off);
  m.kind = static_cast<Kind>(kind);
  m.payload = in.blob();
  in.expect_done();
  return m;
}

size_t Transcript::total_bytes() const {
  size_t total = 0;
  for (const auto& m : messages) total += serialize(m).size();
  return total;
}

std::string Transcript::dump() const {
  std::ostringstream out;
  out << "# run-seed " << run_seed << "\n";
  for (size_t i = 0; i < messages.size(); ++i)
    out << i << " " << to_hex(serialize(messages[i])) << "\n";
  return out.str();
}

Transcript Transcript::parse(const std::string& text) {
  Transcript t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream header(line.substr(1));
      std::string tag;
      header >> tag >> t.run_seed;
      continue;
    }
    std::istringstream rec(line);
    size_t index;
    std::string hex;
    rec >> index >> hex;
    t.messages.push_back(deserialize_envelope(from_hex(hex)));
  }
  return t;
}

void Bus::register_party(PartyId id) {
  std::lock_guard lock(mu_);
  queues_.try_emplace(id);
}

bool Bus::registered(PartyId id) const {
  std::lock_guard lock(mu_);
  return queues_.count(id) > 0;
}

void Bus::send(MessageEnvelope msg) {
  std::lock_guard lock(mu_);
  auto it = queues_.find(msg.receiver);
  if (it == queues_.end())
    throw ProtocolError("routing error: receiver " + msg.receiver.str() + " not registered");
  transcript_.messages.push_back(msg);
  it->second.push_back(std::move(msg));
}

std::vector<MessageEnvelope> Bus::deliver(PartyId receiver) {
  std::lock_guard lock(mu_);
  auto it = queues_.find(receiver);
  if (it == queues_.end())
    throw ProtocolError("routing error: receiver " + receiver.str() + " not registered");
  std::vector<MessageEnvelope> out(it->second.begin(), it->second.end());
  it->second.clear();
  return out;
}

bool Bus::idle() const {
  std::lock_guard lock(mu_);
  for (const auto& [id, q] : queues_)
    if (!q.empty()) return false;
  return true;
}

void run_protocol(std::vector<Party*> parties, Bus& bus, size_t max_steps) {
  for (Party* p : parties) bus.register_party(p->id());
  for (Party* p : parties) p->start(bus);

  size_t steps = 0;
  while (true) {
    bool all_terminal = true;
    for (Party* p : parties)
      if (!p->terminal()) all_terminal = false;
    if (all_terminal && bus.idle()) return;

    bool progressed = false;
    for (Party* p : parties) {
      for (const MessageEnvelope& msg : bus.deliver(p->id())) {
        p->handle(msg, bus);
        progressed = true;
        if (++steps > max_steps) break;
      }
      if (steps > max_steps) break;
    }
    if (steps > max_steps || !progressed) {
      std::string diagnosis = steps > max_steps ? "max_steps exhausted;" : "deadlock;";
      for (Party* p : parties) diagnosis += " " + p->id().str() + "=" + p->phase_name();
      throw ProtocolError(diagnosis);
    }
  }
}

void replay(const Transcript& transcript, std::vector<Party*> parties) {
  Bus sink(transcript.run_seed);
  std::map<PartyId, Party*> by_id;
  for (Party* p : parties) {
    by_id[p->id()] = p;
    sink.register_party(p->id());
  }
  auto drain_all = [&] {
    for (Party* p : parties) sink.deliver(p->id());
  };
  for (Party* p : parties) p->start(sink);
  for (const MessageEnvelope& msg : transcript.messages) {
    auto it = by_id.find(msg.receiver);
    if (it == by_id.end()) continue;
    drain_all();  // recorded messages drive the replay, not live sends
    it->second->handle(msg, sink);
  }
}

}  // namespace fedbench::net
