#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "memlit/program.hpp"
#include "memlit/relation.hpp"

namespace memlit {

enum class EventKind : std::uint8_t { read, write, rmw, fence };

std::string_view to_string(EventKind kind);

/// One dynamic memory action. Every instruction yields exactly one event; a
/// CAS is an RMW when it succeeds and a plain read when it fails. Ids
/// 0..locations-1 are the initial-value pseudo-writes (thread -1).
struct Event {
  EventId id = 0;
  int thread = -1;
  int index = -1;  // position in the thread's code
  EventKind kind = EventKind::fence;
  bool atomic = true;
  MemoryOrder order = MemoryOrder::seq_cst;
  int location = -1;
  Value read_value = 0;
  Value written_value = 0;

  bool is_init() const { return thread < 0; }
  bool reads() const { return kind == EventKind::read || kind == EventKind::rmw; }
  bool writes() const { return kind == EventKind::write || kind == EventKind::rmw; }
  bool is_seq_cst() const { return atomic && !is_init() && order == MemoryOrder::seq_cst; }
  /// Atomic write/RMW with release, acq_rel or seq_cst.
  bool is_release_write() const;
  /// Atomic read/RMW with acquire, acq_rel or seq_cst.
  bool is_acquire_read() const;
  bool is_release_fence() const;
  bool is_acquire_fence() const;

  bool operator==(const Event&) const = default;
};

struct CandidateExecution {
  std::size_t location_count = 0;
  std::vector<Event> events;                // indexed by id
  std::vector<EventId> rf;                  // per event: source write, -1 if it reads nothing
  std::vector<std::vector<EventId>> mo;     // per location, init pseudo-write first
  std::vector<EventId> sc_order;            // the total order S over seq_cst events

  bool operator==(const CandidateExecution&) const = default;
};

inline constexpr std::string_view kHbIrreflexive = "HB-IRREFLEXIVE";
inline constexpr std::string_view kHbMo = "HB-MO";
inline constexpr std::string_view kCoherentRead = "COHERENT-READ";
inline constexpr std::string_view kScRead = "SC-READ";
inline constexpr std::string_view kRmwImmediate = "RMW-IMMEDIATE";
inline constexpr std::string_view kScFence1 = "SC-FENCE-1";
inline constexpr std::string_view kScFence2 = "SC-FENCE-2";
inline constexpr std::string_view kScFence3 = "SC-FENCE-3";
inline constexpr std::string_view kScFence4 = "SC-FENCE-4";
inline constexpr std::string_view kSConsistent = "S-CONSISTENT";

struct AxiomOptions {
  // S must agree with hb and with mo on seq_cst events.
  bool strict_s = true;
};

struct ExecutionJudgment {
  bool consistent = false;
  std::vector<std::string> violated;
  std::vector<std::pair<EventId, EventId>> races;  // only filled when consistent
  Relation sb;
  Relation sw;
  Relation hb;
};

/// Event id of instruction `index` of `thread`.
EventId event_id(const Program& program, std::size_t thread, std::size_t index);

/// Builds the events of `program` for a reads-from choice (`rf_sources`,
/// indexed by event id, -1 for events that do not read) and a per-event
/// spurious-failure choice for cas_weak. Values are propagated through
/// registers. Returns nullopt when the choice is self-justifying
/// (out-of-thin-air) or reads from a CAS that ends up failing. mo and S are
/// left empty.
std::optional<CandidateExecution> instantiate(const Program& program,
                                              const std::vector<EventId>& rf_sources,
                                              const std::vector<bool>& spurious = {});

Relation compute_sb(const CandidateExecution& candidate);

/// Throws std::invalid_argument unless `head` is a release-class write.
std::vector<EventId> release_sequence(const CandidateExecution& candidate, EventId head);

/// Release sequence `head` would head if it were a release operation
/// (`head` must be an atomic write or RMW).
std::vector<EventId> hypothetical_release_sequence(const CandidateExecution& candidate,
                                                   EventId head);

Relation compute_sw(const CandidateExecution& candidate);

/// Transitive closure of sb and sw, with every initial write ordered before
/// all program events.
Relation compute_hb(const CandidateExecution& candidate);

/// Throws std::invalid_argument on a malformed candidate (rf not matching
/// location/value, mo not covering every write, S not covering exactly the
/// seq_cst events).
ExecutionJudgment check_axioms(const CandidateExecution& candidate, const AxiomOptions& options = {});

std::vector<std::pair<EventId, EventId>> detect_races(const CandidateExecution& candidate,
                                                      const Relation& hb);

/// Final registers and memory of a candidate.
Outcome outcome_of(const Program& program, const CandidateExecution& candidate);

struct Cxx11Options {
  bool weak_spurious = true;
  bool strict_s = true;
  std::size_t max_candidates = 1'000'000;
  bool keep_witnesses = false;
};

struct Cxx11Result {
  OutcomeSet outcomes;
  std::size_t candidates = 0;  // (rf, mo) combinations examined
  std::size_t consistent = 0;
  std::map<Outcome, CandidateExecution> witnesses;  // first consistent candidate per outcome
  std::optional<CandidateExecution> racy_witness;
  std::vector<std::pair<EventId, EventId>> races;   // races of racy_witness
  std::set<Outcome> racy_outcomes;  // outcomes produced by at least one racy execution
};

Cxx11Result enumerate_cxx11(const Program& program, const Cxx11Options& options = {});

/// "T0: W x=1 rel", "init: W x=0", "T1: F sc".
std::string describe_event(const Program& program, const Event& e);

}  // namespace memlit
