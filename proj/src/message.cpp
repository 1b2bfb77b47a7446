#include "pnp/message.hpp"

#include <cinttypes>
#include <cstdarg>
#include <cstdio>

namespace pnp::msg {

namespace {

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

std::string pt(Point p) { return fmt("(%.9f,%.9f)", p.x, p.y); }
std::string fid(const FrameId& f) { return fmt("%.9f:%d", f.starter_ts, f.starter_id); }
std::string frame_text(const HexFrame& f) {
    return fmt("origin=%s theta=%.9f side=%.9f starter=%.9f:%d", pt(f.origin).c_str(), f.theta,
               f.side, f.starter_ts, f.starter_id);
}

}  // namespace

int sender_of(const Message& m) {
    return std::visit([](const auto& v) { return v.id; }, m);
}

std::optional<int> receiver_of(const Message& m) {
    return std::visit(
        [](const auto& v) -> std::optional<int> {
            if constexpr (requires { v.receiver_id; })
                return v.receiver_id;
            else
                return std::nullopt;
        },
        m);
}

const char* variant_name(const Message& m) {
    struct V {
        const char* operator()(const IAS&) { return "IAS"; }
        const char* operator()(const InfoSnapped&) { return "InfoSnapped"; }
        const char* operator()(const InfoSlave&) { return "InfoSlave"; }
        const char* operator()(const InfoFree&) { return "InfoFree"; }
        const char* operator()(const SIP&) { return "SIP"; }
        const char* operator()(const AckSIP&) { return "AckSIP"; }
        const char* operator()(const ClaimPosition&) { return "ClaimPosition"; }
        const char* operator()(const PositionTaken&) { return "PositionTaken"; }
        const char* operator()(const InfoStopped&) { return "InfoStopped"; }
        const char* operator()(const IAYS&) { return "IAYS"; }
        const char* operator()(const CardinalityInfo&) { return "CardinalityInfo"; }
        const char* operator()(const Offer&) { return "Offer"; }
        const char* operator()(const AckOffer&) { return "AckOffer"; }
        const char* operator()(const MoveTo&) { return "MoveTo"; }
        const char* operator()(const InfoArrived&) { return "InfoArrived"; }
        const char* operator()(const HoleInfo&) { return "HoleInfo"; }
        const char* operator()(const Subst&) { return "Subst"; }
        const char* operator()(const AckSubst&) { return "AckSubst"; }
        const char* operator()(const SubstArrival&) { return "SubstArrival"; }
        const char* operator()(const ProfilePacket&) { return "ProfilePacket"; }
        const char* operator()(const MoveToSubst&) { return "MoveToSubst"; }
        const char* operator()(const Retirement&) { return "Retirement"; }
    };
    return std::visit(V{}, m);
}

std::string payload_text(const Message& m) {
    struct V {
        std::string operator()(const IAS& v) {
            return fmt("ID=%d coordinates=%s starter_timestamp=%.9f %s", v.id,
                       pt(v.coordinates).c_str(), v.starter_timestamp,
                       frame_text(v.frame).c_str());
        }
        std::string operator()(const InfoSnapped& v) {
            return fmt("ID=%d coordinates=%s virtual_cardinality=%d frame=%s", v.id,
                       pt(v.coordinates).c_str(), v.virtual_cardinality, fid(v.frame).c_str());
        }
        std::string operator()(const InfoSlave& v) {
            return fmt("ID=%d coordinates=%s energy_level=%.9f", v.id, pt(v.coordinates).c_str(),
                       v.energy_level);
        }
        std::string operator()(const InfoFree& v) {
            return fmt("ID=%d coordinates=%s", v.id, pt(v.coordinates).c_str());
        }
        std::string operator()(const SIP& v) {
            return fmt("ID=%d receiver_ID=%d target_position=%s %s", v.id, v.receiver_id,
                       pt(v.target).c_str(), frame_text(v.frame).c_str());
        }
        std::string operator()(const AckSIP& v) {
            return fmt("ID=%d receiver_ID=%d", v.id, v.receiver_id);
        }
        std::string operator()(const ClaimPosition& v) {
            return fmt("ID=%d coordinates=%s timestamp=%.9f", v.id, pt(v.coordinates).c_str(),
                       v.timestamp);
        }
        std::string operator()(const PositionTaken& v) {
            return fmt("ID=%d coordinates=%s", v.id, pt(v.coordinates).c_str());
        }
        std::string operator()(const InfoStopped& v) {
            return fmt("ID=%d coordinates=%s", v.id, pt(v.coordinates).c_str());
        }
        std::string operator()(const IAYS& v) {
            return fmt("ID=%d receiver_ID=%d", v.id, v.receiver_id);
        }
        std::string operator()(const CardinalityInfo& v) {
            return fmt("ID=%d virtual_cardinality=%d", v.id, v.virtual_cardinality);
        }
        std::string operator()(const Offer& v) {
            return fmt("ID=%d receiver_ID=%d virtual_cardinality=%d transaction_ID=%ld", v.id,
                       v.receiver_id, v.virtual_cardinality, v.transaction_id);
        }
        std::string operator()(const AckOffer& v) {
            return fmt("ID=%d receiver_ID=%d", v.id, v.receiver_id);
        }
        std::string operator()(const MoveTo& v) {
            return fmt("ID=%d receiver_ID=%d destination=%s destination_snapped_ID=%d "
                       "transaction_ID=%ld",
                       v.id, v.receiver_id, pt(v.destination).c_str(), v.destination_snapped_id,
                       v.transaction_id);
        }
        std::string operator()(const InfoArrived& v) {
            return fmt("ID=%d receiver_ID=%d transaction_ID=%ld energy_level=%.9f", v.id,
                       v.receiver_id, v.transaction_id, v.energy_level);
        }
        std::string operator()(const HoleInfo& v) {
            return fmt("ID=%d hop_counter=%d order_value=%d hole_coordinates=%s timeout=%.9f "
                       "frame=%s",
                       v.id, v.hop_counter, v.order_value, pt(v.hole).c_str(), v.timeout,
                       fid(v.frame).c_str());
        }
        std::string operator()(const Subst& v) {
            return fmt("ID=%d receiver_ID=%d energy_level=%.9f destination=%s "
                       "destination_snapped_ID=%d transaction_ID=%ld",
                       v.id, v.receiver_id, v.energy_level, pt(v.destination).c_str(),
                       v.destination_snapped_id, v.transaction_id);
        }
        std::string operator()(const AckSubst& v) {
            return fmt("ID=%d receiver_ID=%d", v.id, v.receiver_id);
        }
        std::string operator()(const SubstArrival& v) {
            return fmt("ID=%d receiver_ID=%d", v.id, v.receiver_id);
        }
        std::string operator()(const ProfilePacket& v) {
            return fmt("ID=%d receiver_ID=%d order_value=%d priority_queue=%zu "
                       "neighborhood_information=%zu",
                       v.id, v.receiver_id, v.profile.base_ord, v.profile.triggers.size(),
                       v.profile.neighbors.size());
        }
        std::string operator()(const MoveToSubst& v) {
            return fmt("ID=%d receiver_ID=%d order_value=%d priority_queue=%zu "
                       "neighborhood_information=%zu snap_position=%s",
                       v.id, v.receiver_id, v.profile.base_ord, v.profile.triggers.size(),
                       v.profile.neighbors.size(), pt(v.snap_position).c_str());
        }
        std::string operator()(const Retirement& v) {
            return fmt("ID=%d hole_coordinates=%s", v.id, pt(v.hole).c_str());
        }
    };
    return std::visit(V{}, m);
}

}  // namespace pnp::msg
