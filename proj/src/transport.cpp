#include "tspa/transport.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>

namespace tspa {

const char* to_string(Scheme s) {
    return s == Scheme::shen ? "shen" : "improved";
}

const char* to_string(DecodeError e) {
    switch (e) {
        case DecodeError::BadMagic: return "BadMagic";
        case DecodeError::BadVersion: return "BadVersion";
        case DecodeError::BadScheme: return "BadScheme";
        case DecodeError::BadMsgType: return "BadMsgType";
        case DecodeError::BadFieldCount: return "BadFieldCount";
        case DecodeError::TruncatedField: return "TruncatedField";
        case DecodeError::DuplicateTag: return "DuplicateTag";
        case DecodeError::UnexpectedTag: return "UnexpectedTag";
        case DecodeError::MissingField: return "MissingField";
        case DecodeError::TrailingBytes: return "TrailingBytes";
        case DecodeError::BadFieldWidth: return "BadFieldWidth";
    }
    return "?";
}

namespace {

constexpr std::uint8_t kVersion = 0x01;
const std::array<std::uint8_t, 4> kMagic = {'T', 'S', 'P', 'A'};

enum Tag : std::uint8_t {
    TAG_ID = 0x01,
    TAG_CID = 0x02,
    TAG_X = 0x03,
    TAG_Y = 0x04,
    TAG_Z = 0x05,
    TAG_N = 0x06,
    TAG_E = 0x07,
    TAG_G = 0x08,
    TAG_T = 0x09,
    TAG_R = 0x0A,
    TAG_T2 = 0x0B,
    TAG_REASON = 0x0C,
};

Bytes minimal_encode(const BigInt& x) { return fw_encode(x, byte_width(x)); }

void put_field(Bytes& out, std::uint8_t tag, const Bytes& value) {
    out.push_back(tag);
    Bytes len = fw_encode(BigInt(value.size()), 4);
    out.insert(out.end(), len.begin(), len.end());
    out.insert(out.end(), value.begin(), value.end());
}

Bytes encode_modn(const BigInt& x, std::size_t w) {
    if (byte_width(x) > w) throw FieldOverflow("mod-n field exceeds modulus width");
    return fw_encode(x, w);
}

struct Field {
    std::uint8_t tag;
    Bytes value;
};

} // namespace

Bytes encode_message(const LogicalMessage& m, std::size_t w) {
    Bytes out(kMagic.begin(), kMagic.end());
    out.push_back(kVersion);
    out.push_back(static_cast<std::uint8_t>(m.scheme));
    out.push_back(static_cast<std::uint8_t>(m.type));

    std::vector<Field> fields;
    if (m.type == MsgType::login && m.scheme == Scheme::shen) {
        const auto& msg = std::get<LoginRequestShen>(m.body);
        fields = {{TAG_ID, encode_modn(msg.id, w)},
                  {TAG_CID, encode_modn(msg.cid, w)},
                  {TAG_X, encode_modn(msg.x, w)},
                  {TAG_Y, encode_modn(msg.y, w)},
                  {TAG_N, minimal_encode(msg.n)},
                  {TAG_E, minimal_encode(msg.e)},
                  {TAG_G, minimal_encode(msg.g)},
                  {TAG_T, fw_encode(BigInt(msg.t.seconds), 8)}};
    } else if (m.type == MsgType::login) {
        const auto& msg = std::get<LoginRequestImproved>(m.body);
        if (msg.z.size() != w) throw FieldOverflow("Z width mismatch");
        fields = {{TAG_ID, encode_modn(msg.id, w)},
                  {TAG_Y, encode_modn(msg.y, w)},
                  {TAG_Z, msg.z},
                  {TAG_N, minimal_encode(msg.n)},
                  {TAG_E, minimal_encode(msg.e)},
                  {TAG_G, minimal_encode(msg.g)},
                  {TAG_T, fw_encode(BigInt(msg.t.seconds), 8)}};
    } else if (m.type == MsgType::server_response) {
        const auto& msg = std::get<ServerResponse>(m.body);
        fields = {{TAG_R, encode_modn(msg.r, w)},
                  {TAG_T2, fw_encode(BigInt(msg.t2.seconds), 8)}};
    } else if (m.type == MsgType::reject) {
        fields = {{TAG_REASON, {std::get<RejectMsg>(m.body).reason}}};
    } // accept_notice carries no fields

    out.push_back(static_cast<std::uint8_t>(fields.size()));
    for (const auto& f : fields) put_field(out, f.tag, f.value);
    return out;
}

namespace {

DecodeResult fail(DecodeError e) { return {std::nullopt, e}; }

const std::vector<std::uint8_t>& expected_tags(Scheme s, MsgType t) {
    static const std::vector<std::uint8_t> shen_login = {
        TAG_ID, TAG_CID, TAG_X, TAG_Y, TAG_N, TAG_E, TAG_G, TAG_T};
    static const std::vector<std::uint8_t> improved_login = {
        TAG_ID, TAG_Y, TAG_Z, TAG_N, TAG_E, TAG_G, TAG_T};
    static const std::vector<std::uint8_t> response = {TAG_R, TAG_T2};
    static const std::vector<std::uint8_t> reject = {TAG_REASON};
    static const std::vector<std::uint8_t> none = {};
    switch (t) {
        case MsgType::login:
            return s == Scheme::shen ? shen_login : improved_login;
        case MsgType::server_response: return response;
        case MsgType::reject: return reject;
        case MsgType::accept_notice: return none;
    }
    return none;
}

} // namespace

DecodeResult decode_message(const Bytes& wire) {
    if (wire.size() < 4 || !std::equal(kMagic.begin(), kMagic.end(), wire.begin()))
        return fail(DecodeError::BadMagic);
    if (wire.size() < 5 || wire[4] != kVersion) return fail(DecodeError::BadVersion);
    if (wire.size() < 6 || wire[5] > 0x01) return fail(DecodeError::BadScheme);
    if (wire.size() < 7 || wire[6] < 0x01 || wire[6] > 0x04)
        return fail(DecodeError::BadMsgType);
    if (wire.size() < 8) return fail(DecodeError::BadFieldCount);

    auto scheme = static_cast<Scheme>(wire[5]);
    auto type = static_cast<MsgType>(wire[6]);
    std::uint8_t count = wire[7];

    std::map<std::uint8_t, Bytes> fields;
    std::size_t pos = 8;
    for (std::uint8_t i = 0; i < count; ++i) {
        if (wire.size() - pos < 5) return fail(DecodeError::TruncatedField);
        std::uint8_t tag = wire[pos];
        std::uint64_t len = 0;
        for (int j = 1; j <= 4; ++j) len = (len << 8) | wire[pos + j];
        pos += 5;
        if (wire.size() - pos < len) return fail(DecodeError::TruncatedField);
        if (fields.contains(tag)) return fail(DecodeError::DuplicateTag);
        fields[tag] = Bytes(wire.begin() + pos, wire.begin() + pos + len);
        pos += len;
    }
    if (pos != wire.size()) return fail(DecodeError::TrailingBytes);

    const auto& expected = expected_tags(scheme, type);
    if (count != expected.size()) return fail(DecodeError::BadFieldCount);
    for (const auto& [tag, value] : fields) {
        if (std::find(expected.begin(), expected.end(), tag) == expected.end())
            return fail(DecodeError::UnexpectedTag);
    }
    for (std::uint8_t tag : expected) {
        if (!fields.contains(tag)) return fail(DecodeError::MissingField);
    }

    LogicalMessage out;
    out.scheme = scheme;
    out.type = type;
    auto ts_of = [&](std::uint8_t tag) {
        return Timestamp{static_cast<std::uint64_t>(fw_decode(fields[tag]))};
    };

    if (type == MsgType::login) {
        const Bytes& nb = fields[TAG_N];
        if (nb.empty() || nb[0] == 0) return fail(DecodeError::BadFieldWidth);
        std::size_t w = nb.size();
        for (std::uint8_t tag : {TAG_ID, TAG_CID, TAG_X, TAG_Y, TAG_Z}) {
            if (fields.contains(tag) && fields[tag].size() != w)
                return fail(DecodeError::BadFieldWidth);
        }
        for (std::uint8_t tag : {TAG_E, TAG_G}) {
            if (fields[tag].empty() || fields[tag][0] == 0)
                return fail(DecodeError::BadFieldWidth);
        }
        if (fields[TAG_T].size() != 8) return fail(DecodeError::BadFieldWidth);
        if (scheme == Scheme::shen) {
            LoginRequestShen msg;
            msg.id = fw_decode(fields[TAG_ID]);
            msg.cid = fw_decode(fields[TAG_CID]);
            msg.x = fw_decode(fields[TAG_X]);
            msg.y = fw_decode(fields[TAG_Y]);
            msg.n = fw_decode(nb);
            msg.e = fw_decode(fields[TAG_E]);
            msg.g = fw_decode(fields[TAG_G]);
            msg.t = ts_of(TAG_T);
            out.body = std::move(msg);
        } else {
            LoginRequestImproved msg;
            msg.id = fw_decode(fields[TAG_ID]);
            msg.y = fw_decode(fields[TAG_Y]);
            msg.z = fields[TAG_Z];
            msg.n = fw_decode(nb);
            msg.e = fw_decode(fields[TAG_E]);
            msg.g = fw_decode(fields[TAG_G]);
            msg.t = ts_of(TAG_T);
            out.body = std::move(msg);
        }
    } else if (type == MsgType::server_response) {
        if (fields[TAG_T2].size() != 8) return fail(DecodeError::BadFieldWidth);
        if (fields[TAG_R].empty()) return fail(DecodeError::BadFieldWidth);
        ServerResponse msg;
        msg.r = fw_decode(fields[TAG_R]);
        msg.t2 = ts_of(TAG_T2);
        out.body = msg;
    } else if (type == MsgType::reject) {
        if (fields[TAG_REASON].size() != 1) return fail(DecodeError::BadFieldWidth);
        out.body = RejectMsg{fields[TAG_REASON][0]};
    } else {
        out.body = AcceptNotice{};
    }
    return {std::move(out), DecodeError{}};
}

// ---- key / card files ----

namespace {

std::string to_hex(const BigInt& v) {
    std::ostringstream ss;
    ss << std::hex << v;
    return ss.str();
}

BigInt from_hex(const std::string& s) {
    if (s.empty()) return 0;
    BigInt v;
    std::istringstream ss(s);
    ss >> std::hex >> v;
    if (ss.fail()) throw std::runtime_error("bad hex value: " + s);
    return v;
}

std::string str_to_hex(const std::string& s) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned char c : s) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

std::string hex_to_str(const std::string& h) {
    if (h.size() % 2) throw std::runtime_error("odd-length hex string");
    std::string out;
    for (std::size_t i = 0; i < h.size(); i += 2)
        out.push_back(static_cast<char>(std::stoi(h.substr(i, 2), nullptr, 16)));
    return out;
}

std::map<std::string, std::string> parse_kv_file(const std::string& path,
                                                 const std::string& magic) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != magic)
        throw std::runtime_error(path + ": missing header " + magic);
    std::map<std::string, std::string> kv;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto eq = line.find(" = ");
        if (eq == std::string::npos)
            throw std::runtime_error(path + ": malformed line: " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return kv;
}

void write_oneway(std::ostream& out, const OneWayConfig& cfg) {
    out << "f_mode = " << (cfg.mode == FMode::hash ? "0" : "1") << "\n";
    out << "toy_bound = " << std::hex << cfg.toy_bound << std::dec << "\n";
    out << "digest = " << str_to_hex(cfg.digest) << "\n";
}

OneWayConfig read_oneway(std::map<std::string, std::string>& kv) {
    OneWayConfig cfg;
    cfg.mode = kv.at("f_mode") == "0" ? FMode::hash : FMode::toy;
    cfg.toy_bound = static_cast<std::uint64_t>(from_hex(kv.at("toy_bound")));
    cfg.digest = hex_to_str(kv.at("digest"));
    return cfg;
}

} // namespace

void save_key_file(const std::string& path, const Kic& kic) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    const auto& p = kic.params();
    out << "tspa-key-v1\n";
    out << "p = " << to_hex(p.p) << "\n";
    out << "q = " << to_hex(p.q) << "\n";
    out << "n = " << to_hex(p.n) << "\n";
    out << "e = " << to_hex(p.e) << "\n";
    out << "d = " << to_hex(p.d) << "\n";
    out << "g = " << to_hex(p.g) << "\n";
    write_oneway(out, p.f_config);
    out << "modulus_width = " << std::hex << p.modulus_width << std::dec << "\n";
    out << "id_mode = " << (kic.id_policy().mode == IdMode::strict ? "0" : "1") << "\n";
    out << "id_tag = " << std::hex << kic.id_policy().tag << std::dec << "\n";
    std::size_t i = 0;
    for (const auto& [id, rec] : kic.users()) {
        out << "user." << i << ".id = " << to_hex(rec.id) << "\n";
        out << "user." << i << ".enrolled_at = " << std::hex << rec.enrolled_at.seconds
            << std::dec << "\n";
        out << "user." << i << ".h = " << to_hex(rec.h) << "\n";
        ++i;
    }
}

Kic load_key_file(const std::string& path) {
    auto kv = parse_kv_file(path, "tspa-key-v1");
    SystemParams sp;
    sp.p = from_hex(kv.at("p"));
    sp.q = from_hex(kv.at("q"));
    sp.n = from_hex(kv.at("n"));
    sp.e = from_hex(kv.at("e"));
    sp.d = from_hex(kv.at("d"));
    sp.g = from_hex(kv.at("g"));
    sp.f_config = read_oneway(kv);
    sp.modulus_width = static_cast<std::size_t>(from_hex(kv.at("modulus_width")));
    IdPolicy policy;
    policy.mode = kv.at("id_mode") == "0" ? IdMode::strict : IdMode::permissive;
    policy.tag = static_cast<std::uint16_t>(from_hex(kv.at("id_tag")));
    Kic kic(std::move(sp), policy);
    for (std::size_t i = 0;; ++i) {
        std::string prefix = "user." + std::to_string(i) + ".";
        auto it = kv.find(prefix + "id");
        if (it == kv.end()) break;
        UserRecord rec;
        rec.id = from_hex(it->second);
        rec.enrolled_at = {static_cast<std::uint64_t>(from_hex(kv.at(prefix + "enrolled_at")))};
        rec.h = from_hex(kv.at(prefix + "h"));
        kic.restore_user(std::move(rec));
    }
    return kic;
}

void save_card_file(const std::string& path, const CardData& card) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "tspa-card-v1\n";
    out << "n = " << to_hex(card.n) << "\n";
    out << "e = " << to_hex(card.e) << "\n";
    out << "g = " << to_hex(card.g) << "\n";
    out << "id = " << to_hex(card.id) << "\n";
    out << "cid = " << to_hex(card.cid) << "\n";
    out << "s = " << to_hex(card.s) << "\n";
    out << "h = " << to_hex(card.h) << "\n";
    write_oneway(out, card.f_config);
    out << "modulus_width = " << std::hex << card.modulus_width << std::dec << "\n";
}

CardData load_card_file(const std::string& path) {
    auto kv = parse_kv_file(path, "tspa-card-v1");
    CardData card;
    card.n = from_hex(kv.at("n"));
    card.e = from_hex(kv.at("e"));
    card.g = from_hex(kv.at("g"));
    card.id = from_hex(kv.at("id"));
    card.cid = from_hex(kv.at("cid"));
    card.s = from_hex(kv.at("s"));
    card.h = from_hex(kv.at("h"));
    card.f_config = read_oneway(kv);
    card.modulus_width = static_cast<std::size_t>(from_hex(kv.at("modulus_width")));
    return card;
}

// ---- channel simulator ----

ChannelSim::ChannelSim(std::shared_ptr<const Clock> clock,
                       std::uint64_t fixed_delay, std::uint64_t jitter,
                       std::uint64_t jitter_seed)
    : clock_(std::move(clock)),
      fixed_delay_(fixed_delay),
      jitter_(jitter),
      jitter_eng_(jitter_seed) {}

std::deque<ChannelSim::Pending>& ChannelSim::queue(Direction dir) {
    return dir == Direction::to_server ? to_server_ : to_client_;
}

void ChannelSim::send(Direction dir, const Bytes& frame) {
    Timestamp now = clock_->now();
    TapFn tap;
    {
        std::lock_guard lock(mu_);
        std::uint64_t delay = fixed_delay_;
        if (jitter_ > 0) delay += jitter_eng_() % (jitter_ + 1);
        queue(dir).push_back({frame, now.seconds + delay, false});
        tap = tap_;
    }
    if (tap) tap(dir, frame, now);
}

void ChannelSim::inject(Direction dir, const Bytes& frame) {
    std::lock_guard lock(mu_);
    queue(dir).push_front({frame, 0, true});
}

std::optional<Bytes> ChannelSim::recv(Direction dir) {
    std::lock_guard lock(mu_);
    auto& q = queue(dir);
    if (q.empty()) return std::nullopt;
    if (!q.front().injected && q.front().ready_at > clock_->now().seconds)
        return std::nullopt;
    Bytes frame = std::move(q.front().frame);
    q.pop_front();
    return frame;
}

void ChannelSim::attach_tap(TapFn tap) {
    std::lock_guard lock(mu_);
    tap_ = std::move(tap);
}

} // namespace tspa
