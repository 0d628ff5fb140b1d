#include "slicing/handover.hpp"

#include <algorithm>

namespace slicing::handover {

namespace {

constexpr std::array<std::string_view, kNumEventKinds> kKindNames = {
    "MeasurementReport", "HandoverDecision", "HandoverCommand", "SyncToTarget", "PathSwitchRequest",
    "PathSwitchAck",     "HandoverComplete", "ReleaseSource",   "Timeout",
};

constexpr std::array<std::string_view, 7> kActorNames = {
    "user", "source-access", "target-access", "source-edge", "target-edge", "core-cloud", "sdn-controller",
};

constexpr std::array<std::string_view, 7> kPhaseNames = {
    "Idle", "Reported", "Decided", "Executing", "PathSwitching", "Complete", "Failed",
};

bool key_kinds_in_order(const std::vector<EventKind>& seq) {
    constexpr std::array<EventKind, 4> key = {EventKind::MeasurementReport, EventKind::HandoverDecision,
                                              EventKind::PathSwitchRequest, EventKind::PathSwitchAck};
    std::size_t next = 0;
    for (EventKind k : seq)
        if (next < key.size() && k == key[next]) ++next;
    return next == key.size();
}

struct Checker {
    int max_length;
    ModelCheck out;
    std::vector<EventKind> seq;

    // rejected: an earlier event was refused, so the fold already stopped.
    void visit(Cursor at, bool rejected) {
        ++out.sequences;
        if (rejected) {
            ++out.rejected;
        } else if (at.phase == Phase::Complete) {
            ++out.complete;
            if (!std::equal(seq.begin(), seq.end(), kCanonicalOrder.begin(), kCanonicalOrder.end()))
                ++out.non_canonical_complete;
            if (!key_kinds_in_order(seq)) ++out.unsafe_complete;
        } else if (at.phase == Phase::Failed) {
            ++out.failed;
        }
        if (static_cast<int>(seq.size()) == max_length) return;
        for (int k = 0; k < kNumEventKinds; ++k) {
            const EventKind kind = static_cast<EventKind>(k);
            seq.push_back(kind);
            if (rejected) {
                visit(at, true);
            } else {
                const Step s = transition(at, kind);
                visit(s.next.value_or(at), !s.next);
            }
            seq.pop_back();
        }
    }
};

}  // namespace

std::string_view kind_name(EventKind k) { return kKindNames[static_cast<int>(k)]; }
std::string_view actor_name(Actor a) { return kActorNames[static_cast<int>(a)]; }
std::string_view phase_name(Phase p) { return kPhaseNames[static_cast<int>(p)]; }

EventKind parse_kind(std::string_view name) {
    for (int i = 0; i < kNumEventKinds; ++i)
        if (kKindNames[i] == name) return static_cast<EventKind>(i);
    throw Error(ErrorKind::InvalidConfig, "unknown event kind '" + std::string(name) + "'");
}

Actor parse_actor(std::string_view name) {
    for (std::size_t i = 0; i < kActorNames.size(); ++i)
        if (kActorNames[i] == name) return static_cast<Actor>(i);
    throw Error(ErrorKind::InvalidConfig, "unknown actor '" + std::string(name) + "'");
}

std::optional<Actor> required_actor(EventKind k) {
    switch (k) {
        case EventKind::MeasurementReport: return Actor::User;
        case EventKind::HandoverDecision: return Actor::SdnController;
        case EventKind::HandoverCommand: return Actor::SourceAccess;
        case EventKind::SyncToTarget: return Actor::User;
        case EventKind::PathSwitchRequest: return Actor::TargetEdge;
        case EventKind::PathSwitchAck: return Actor::CoreCloud;
        case EventKind::HandoverComplete: return Actor::TargetAccess;
        case EventKind::ReleaseSource: return Actor::SourceEdge;
        case EventKind::Timeout: return std::nullopt;
    }
    return std::nullopt;
}

bool actor_allowed(EventKind k, Actor a) {
    const std::optional<Actor> r = required_actor(k);
    return !r || *r == a;
}

bool is_terminal(Phase p) { return p == Phase::Complete || p == Phase::Failed; }

Step transition(Cursor at, EventKind kind) {
    if (is_terminal(at.phase)) return {std::nullopt, ErrorKind::TerminalState};
    if (kind == EventKind::Timeout) return {Cursor{Phase::Failed, 0}, ErrorKind::IllegalTransition};
    auto go = [](Phase p, int step) { return Step{Cursor{p, step}, ErrorKind::IllegalTransition}; };
    switch (at.phase) {
        case Phase::Idle:
            if (kind == EventKind::MeasurementReport) return go(Phase::Reported, 0);
            break;
        case Phase::Reported:
            if (kind == EventKind::HandoverDecision) return go(Phase::Decided, 0);
            break;
        case Phase::Decided:
            if (at.step == 0 && kind == EventKind::HandoverCommand) return go(Phase::Decided, 1);
            if (at.step == 1 && kind == EventKind::SyncToTarget) return go(Phase::Executing, 0);
            break;
        case Phase::Executing:
            if (kind == EventKind::PathSwitchRequest) return go(Phase::PathSwitching, 0);
            break;
        case Phase::PathSwitching:
            if (at.step == 0 && kind == EventKind::PathSwitchAck) return go(Phase::PathSwitching, 1);
            if (at.step == 1 && kind == EventKind::HandoverComplete) return go(Phase::PathSwitching, 2);
            if (at.step == 2 && kind == EventKind::ReleaseSource) return go(Phase::Complete, 0);
            break;
        case Phase::Complete:
        case Phase::Failed: break;
    }
    return {std::nullopt, ErrorKind::IllegalTransition};
}

HandoverState advance(HandoverState state, const HandoverEvent& event) {
    const std::string where = std::string(phase_name(state.phase())) + " + " + std::string(kind_name(event.kind));
    if (is_terminal(state.phase())) throw Error(ErrorKind::TerminalState, where);
    if (!actor_allowed(event.kind, event.actor))
        throw Error(ErrorKind::IllegalActor, where + " from " + std::string(actor_name(event.actor)));
    if (!state.history.empty() && event.slice_id != state.slice_id)
        throw Error(ErrorKind::IllegalTransition, where + " for slice '" + event.slice_id +
                                                      "' in a handover of slice '" + state.slice_id + "'");
    const Step s = transition(state.cursor, event.kind);
    if (!s.next) throw Error(s.error, where);
    if (state.history.empty()) state.slice_id = event.slice_id;
    state.cursor = *s.next;
    state.history.push_back(event);
    return state;
}

TraceResult run_trace(const std::vector<HandoverEvent>& events) {
    TraceResult r;
    for (std::size_t i = 0; i < events.size(); ++i) {
        try {
            r.state = advance(r.state, events[i]);
        } catch (const Error& e) {
            r.error = TraceError{i, e.kind(), e.what()};
            return r;
        }
    }
    return r;
}

std::vector<HandoverEvent> canonical_trace(const std::string& slice_id) {
    std::vector<HandoverEvent> out;
    for (EventKind k : kCanonicalOrder) out.push_back({k, *required_actor(k), slice_id});
    return out;
}

ModelCheck model_check(int max_length) {
    Checker c{max_length, {}, {}};
    c.seq.reserve(max_length);
    c.visit(Cursor{}, false);
    return c.out;
}

}  // namespace slicing::handover
