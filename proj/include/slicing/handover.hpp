#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slicing/error.hpp"

namespace slicing::handover {

enum class EventKind : std::uint8_t {
    MeasurementReport,
    HandoverDecision,
    HandoverCommand,
    SyncToTarget,
    PathSwitchRequest,
    PathSwitchAck,
    HandoverComplete,
    ReleaseSource,
    Timeout,
};
inline constexpr int kNumEventKinds = 9;

enum class Actor : std::uint8_t {
    User,
    SourceAccess,
    TargetAccess,
    SourceEdge,
    TargetEdge,
    CoreCloud,
    SdnController,
};

enum class Phase : std::uint8_t { Idle, Reported, Decided, Executing, PathSwitching, Complete, Failed };

std::string_view kind_name(EventKind k);
std::string_view actor_name(Actor a);
std::string_view phase_name(Phase p);
EventKind parse_kind(std::string_view name);  // Error(InvalidConfig) if unknown
Actor parse_actor(std::string_view name);

// The only actor allowed to send each kind; Timeout may come from anyone.
std::optional<Actor> required_actor(EventKind k);
bool actor_allowed(EventKind k, Actor a);

bool is_terminal(Phase p);

struct HandoverEvent {
    EventKind kind = EventKind::MeasurementReport;
    Actor actor = Actor::User;
    std::string slice_id;

    bool operator==(const HandoverEvent&) const = default;
};

// Position inside the procedure. Decided and PathSwitching span several
// messages; step counts the messages already seen in the phase.
struct Cursor {
    Phase phase = Phase::Idle;
    int step = 0;

    bool operator==(const Cursor&) const = default;
};

struct Step {
    std::optional<Cursor> next;  // empty: the event is rejected
    ErrorKind error = ErrorKind::IllegalTransition;
};

// Pure transition function over kinds only.
Step transition(Cursor at, EventKind kind);

struct HandoverState {
    Cursor cursor;
    std::string slice_id;
    std::vector<HandoverEvent> history;

    Phase phase() const { return cursor.phase; }
    bool operator==(const HandoverState&) const = default;
};

// Throws Error(TerminalState), Error(IllegalActor) or Error(IllegalTransition).
// An event for a different slice than the first one is an illegal transition.
HandoverState advance(HandoverState state, const HandoverEvent& event);

struct TraceError {
    std::size_t index = 0;
    ErrorKind kind = ErrorKind::IllegalTransition;
    std::string message;
};

struct TraceResult {
    HandoverState state;  // state before the failing event, if any
    std::optional<TraceError> error;

    bool complete() const { return !error && state.phase() == Phase::Complete; }
};

TraceResult run_trace(const std::vector<HandoverEvent>& events);

// MeasurementReport, HandoverDecision, HandoverCommand, SyncToTarget,
// PathSwitchRequest, PathSwitchAck, HandoverComplete, ReleaseSource, each from
// its required actor.
std::vector<HandoverEvent> canonical_trace(const std::string& slice_id = "embb");

inline constexpr std::array<EventKind, 8> kCanonicalOrder = {
    EventKind::MeasurementReport, EventKind::HandoverDecision,  EventKind::HandoverCommand,
    EventKind::SyncToTarget,      EventKind::PathSwitchRequest, EventKind::PathSwitchAck,
    EventKind::HandoverComplete,  EventKind::ReleaseSource,
};

struct ModelCheck {
    std::uint64_t sequences = 0;           // all kind sequences of length 0..max_length
    std::uint64_t complete = 0;            // folds that end in Complete without error
    std::uint64_t non_canonical_complete = 0;
    std::uint64_t unsafe_complete = 0;     // Complete without the four key kinds in order
    std::uint64_t failed = 0;
    std::uint64_t rejected = 0;
};

// Exhaustive enumeration of every sequence of event kinds up to max_length.
ModelCheck model_check(int max_length);

}  // namespace slicing::handover
