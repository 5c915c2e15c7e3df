//! Append-only event log.
//!
//! One record per line:
//!
//! ```text
//! <time> <kind> <key>=<value> <key>=<value> ...
//! ```
//!
//! `time` is simulated seconds with exactly six decimals. Keys appear in a
//! fixed order per kind. Currency has two decimals; other reals use the
//! shortest representation that parses back to the same `f64`, so a log
//! read back yields exactly the records that were written.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};
use core::str::FromStr;

use crate::auction::RenegotiationKind;
use crate::vo::{VoId, VoKind};
use crate::{ContentId, LocationId, Money, ProviderId, SimTime};

#[derive(Debug, Clone, PartialEq)]
pub enum LogEvent {
    Request { req: u64, content: ContentId, region: LocationId, server: ProviderId, latency_ms: u32, sigma: bool, load: f64 },
    Penalty { provider: ProviderId, content: ContentId, region: LocationId, load: f64, cost: f64 },
    Predict { auction: u64, content: ContentId, duration: SimTime, horizon: u64, empirical: f64, binomial: f64, zipf: f64 },
    AuctionOpened { auction: u64, buyer: ProviderId, content: ContentId, region: LocationId, duration: SimTime, retry: u32, renegotiation: bool },
    AuctionRefused { buyer: ProviderId, content: ContentId, region: LocationId, budget: f64 },
    BidRevealed { auction: u64, seller: ProviderId, amount: Money, at: SimTime },
    AuctionCleared { auction: u64, reserve: Money, outcome: String, winners: u32, payment: Money },
    AuctionRetry { auction: u64, duration: SimTime, retry: u32 },
    SlaRisk { buyer: ProviderId, content: ContentId, region: LocationId },
    VoFormed { vo: VoId, kind: VoKind, buyer: ProviderId, content: ContentId, expires: SimTime, prev: Option<VoId> },
    VoClosed { vo: VoId, reason: String },
    ReplicaPlaced { vo: VoId, provider: ProviderId, content: ContentId, size_mb: f64, payment: Money, used_mb: f64 },
    ReplicaTransferred { vo: VoId, provider: ProviderId, content: ContentId, payment: Money },
    ReplicaEvicted { vo: VoId, provider: ProviderId, content: ContentId, used_mb: f64 },
    ReplicaExpired { vo: VoId, provider: ProviderId, content: ContentId, used_mb: f64 },
    ReplicaReleased { vo: VoId, provider: ProviderId, content: ContentId, used_mb: f64 },
    WinnerDropped { provider: ProviderId, content: ContentId },
    PolicyDenied { buyer: ProviderId, content: ContentId, rules: Vec<usize> },
    Renegotiation { vo: VoId, kind: RenegotiationKind, seller: ProviderId, content: ContentId },
    FlashCrowd { phase: String, region: LocationId, lo: ContentId, hi: ContentId },
    ScheduledNotice { region: LocationId, lo: ContentId, hi: ContentId, start: SimTime },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRecord {
    pub time: SimTime,
    pub event: LogEvent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: &'static str,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

fn flag(b: bool) -> u8 {
    b as u8
}

fn vo_opt(v: Option<VoId>) -> String {
    match v {
        Some(id) => alloc::format!("{id}"),
        None => String::from("-"),
    }
}

fn join(rules: &[usize]) -> String {
    let mut s = String::new();
    for (i, r) in rules.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{r}");
    }
    s
}

impl LogEvent {
    pub fn kind(&self) -> &'static str {
        match self {
            LogEvent::Request { .. } => "request",
            LogEvent::Penalty { .. } => "penalty",
            LogEvent::Predict { .. } => "predict",
            LogEvent::AuctionOpened { .. } => "auction-open",
            LogEvent::AuctionRefused { .. } => "auction-refused",
            LogEvent::BidRevealed { .. } => "bid",
            LogEvent::AuctionCleared { .. } => "auction-clear",
            LogEvent::AuctionRetry { .. } => "auction-retry",
            LogEvent::SlaRisk { .. } => "sla-risk",
            LogEvent::VoFormed { .. } => "vo-formed",
            LogEvent::VoClosed { .. } => "vo-closed",
            LogEvent::ReplicaPlaced { .. } => "replica-placed",
            LogEvent::ReplicaTransferred { .. } => "replica-transferred",
            LogEvent::ReplicaEvicted { .. } => "replica-evicted",
            LogEvent::ReplicaExpired { .. } => "replica-expired",
            LogEvent::ReplicaReleased { .. } => "replica-released",
            LogEvent::WinnerDropped { .. } => "winner-dropped",
            LogEvent::PolicyDenied { .. } => "policy-denied",
            LogEvent::Renegotiation { .. } => "renegotiation",
            LogEvent::FlashCrowd { .. } => "flash-crowd",
            LogEvent::ScheduledNotice { .. } => "scheduled-notice",
        }
    }
}

impl fmt::Display for LogRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.time, self.event.kind())?;
        use LogEvent::*;
        match &self.event {
            Request { req, content, region, server, latency_ms, sigma, load } => write!(
                f,
                " req={req} content={content} region={region} server={server} latency_ms={latency_ms} sigma={} load={load}",
                flag(*sigma)
            ),
            Penalty { provider, content, region, load, cost } => {
                write!(f, " provider={provider} content={content} region={region} load={load} cost={cost}")
            }
            Predict { auction, content, duration, horizon, empirical, binomial, zipf } => write!(
                f,
                " auction={auction} content={content} duration={duration} horizon={horizon} empirical={empirical} binomial={binomial} zipf={zipf}"
            ),
            AuctionOpened { auction, buyer, content, region, duration, retry, renegotiation } => write!(
                f,
                " auction={auction} buyer={buyer} content={content} region={region} duration={duration} retry={retry} renegotiation={}",
                flag(*renegotiation)
            ),
            AuctionRefused { buyer, content, region, budget } => {
                write!(f, " buyer={buyer} content={content} region={region} budget={budget}")
            }
            BidRevealed { auction, seller, amount, at } => write!(f, " auction={auction} seller={seller} amount={amount} at={at}"),
            AuctionCleared { auction, reserve, outcome, winners, payment } => write!(
                f,
                " auction={auction} reserve={reserve} outcome={outcome} winners={winners} payment={payment}"
            ),
            AuctionRetry { auction, duration, retry } => write!(f, " auction={auction} duration={duration} retry={retry}"),
            SlaRisk { buyer, content, region } => write!(f, " buyer={buyer} content={content} region={region}"),
            VoFormed { vo, kind, buyer, content, expires, prev } => write!(
                f,
                " vo={vo} kind={} buyer={buyer} content={content} expires={expires} prev={}",
                kind.as_str(),
                vo_opt(*prev)
            ),
            VoClosed { vo, reason } => write!(f, " vo={vo} reason={reason}"),
            ReplicaPlaced { vo, provider, content, size_mb, payment, used_mb } => write!(
                f,
                " vo={vo} provider={provider} content={content} size_mb={size_mb} payment={payment} used_mb={used_mb}"
            ),
            ReplicaTransferred { vo, provider, content, payment } => {
                write!(f, " vo={vo} provider={provider} content={content} payment={payment}")
            }
            ReplicaEvicted { vo, provider, content, used_mb }
            | ReplicaExpired { vo, provider, content, used_mb }
            | ReplicaReleased { vo, provider, content, used_mb } => {
                write!(f, " vo={vo} provider={provider} content={content} used_mb={used_mb}")
            }
            WinnerDropped { provider, content } => write!(f, " provider={provider} content={content}"),
            PolicyDenied { buyer, content, rules } => write!(f, " buyer={buyer} content={content} rules={}", join(rules)),
            Renegotiation { vo, kind, seller, content } => {
                write!(f, " vo={vo} kind={} seller={seller} content={content}", kind.as_str())
            }
            FlashCrowd { phase, region, lo, hi } => write!(f, " phase={phase} region={region} lo={lo} hi={hi}"),
            ScheduledNotice { region, lo, hi, start } => write!(f, " region={region} lo={lo} hi={hi} start={start}"),
        }
    }
}

struct Fields<'a> {
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> Fields<'a> {
    fn raw(&self, key: &str) -> Result<&'a str, &'static str> {
        self.map.get(key).copied().ok_or("missing field")
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<T, &'static str> {
        self.raw(key)?.parse().map_err(|_| "malformed field")
    }

    fn content(&self, key: &str) -> Result<ContentId, &'static str> {
        self.get(key).map(ContentId)
    }

    fn region(&self, key: &str) -> Result<LocationId, &'static str> {
        self.get(key).map(LocationId)
    }

    fn provider(&self, key: &str) -> Result<ProviderId, &'static str> {
        self.raw(key).map(ProviderId::new)
    }

    fn vo(&self, key: &str) -> Result<VoId, &'static str> {
        self.get(key).map(VoId)
    }

    fn flag(&self, key: &str) -> Result<bool, &'static str> {
        match self.raw(key)? {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err("malformed flag"),
        }
    }

    fn money(&self, key: &str) -> Result<Money, &'static str> {
        self.get(key)
    }

    fn time(&self, key: &str) -> Result<SimTime, &'static str> {
        self.get(key)
    }
}

fn parse_event(kind: &str, f: &Fields<'_>) -> Result<LogEvent, &'static str> {
    use LogEvent::*;
    Ok(match kind {
        "request" => Request {
            req: f.get("req")?,
            content: f.content("content")?,
            region: f.region("region")?,
            server: f.provider("server")?,
            latency_ms: f.get("latency_ms")?,
            sigma: f.flag("sigma")?,
            load: f.get("load")?,
        },
        "penalty" => Penalty {
            provider: f.provider("provider")?,
            content: f.content("content")?,
            region: f.region("region")?,
            load: f.get("load")?,
            cost: f.get("cost")?,
        },
        "predict" => Predict {
            auction: f.get("auction")?,
            content: f.content("content")?,
            duration: f.time("duration")?,
            horizon: f.get("horizon")?,
            empirical: f.get("empirical")?,
            binomial: f.get("binomial")?,
            zipf: f.get("zipf")?,
        },
        "auction-open" => AuctionOpened {
            auction: f.get("auction")?,
            buyer: f.provider("buyer")?,
            content: f.content("content")?,
            region: f.region("region")?,
            duration: f.time("duration")?,
            retry: f.get("retry")?,
            renegotiation: f.flag("renegotiation")?,
        },
        "auction-refused" => AuctionRefused {
            buyer: f.provider("buyer")?,
            content: f.content("content")?,
            region: f.region("region")?,
            budget: f.get("budget")?,
        },
        "bid" => BidRevealed {
            auction: f.get("auction")?,
            seller: f.provider("seller")?,
            amount: f.money("amount")?,
            at: f.time("at")?,
        },
        "auction-clear" => AuctionCleared {
            auction: f.get("auction")?,
            reserve: f.money("reserve")?,
            outcome: String::from(f.raw("outcome")?),
            winners: f.get("winners")?,
            payment: f.money("payment")?,
        },
        "auction-retry" => AuctionRetry {
            auction: f.get("auction")?,
            duration: f.time("duration")?,
            retry: f.get("retry")?,
        },
        "sla-risk" => SlaRisk { buyer: f.provider("buyer")?, content: f.content("content")?, region: f.region("region")? },
        "vo-formed" => VoFormed {
            vo: f.vo("vo")?,
            kind: VoKind::parse(f.raw("kind")?).ok_or("unknown vo kind")?,
            buyer: f.provider("buyer")?,
            content: f.content("content")?,
            expires: f.time("expires")?,
            prev: match f.raw("prev")? {
                "-" => None,
                _ => Some(f.vo("prev")?),
            },
        },
        "vo-closed" => VoClosed { vo: f.vo("vo")?, reason: String::from(f.raw("reason")?) },
        "replica-placed" => ReplicaPlaced {
            vo: f.vo("vo")?,
            provider: f.provider("provider")?,
            content: f.content("content")?,
            size_mb: f.get("size_mb")?,
            payment: f.money("payment")?,
            used_mb: f.get("used_mb")?,
        },
        "replica-transferred" => ReplicaTransferred {
            vo: f.vo("vo")?,
            provider: f.provider("provider")?,
            content: f.content("content")?,
            payment: f.money("payment")?,
        },
        "replica-evicted" | "replica-expired" | "replica-released" => {
            let (vo, provider, content, used_mb) =
                (f.vo("vo")?, f.provider("provider")?, f.content("content")?, f.get("used_mb")?);
            match kind {
                "replica-evicted" => ReplicaEvicted { vo, provider, content, used_mb },
                "replica-expired" => ReplicaExpired { vo, provider, content, used_mb },
                _ => ReplicaReleased { vo, provider, content, used_mb },
            }
        }
        "winner-dropped" => WinnerDropped { provider: f.provider("provider")?, content: f.content("content")? },
        "policy-denied" => PolicyDenied {
            buyer: f.provider("buyer")?,
            content: f.content("content")?,
            rules: {
                let raw = f.raw("rules")?;
                if raw.is_empty() {
                    Vec::new()
                } else {
                    raw.split(',').map(|r| r.parse().map_err(|_| "malformed rule list")).collect::<Result<_, _>>()?
                }
            },
        },
        "renegotiation" => Renegotiation {
            vo: f.vo("vo")?,
            kind: RenegotiationKind::parse(f.raw("kind")?).ok_or("unknown renegotiation kind")?,
            seller: f.provider("seller")?,
            content: f.content("content")?,
        },
        "flash-crowd" => FlashCrowd {
            phase: String::from(f.raw("phase")?),
            region: f.region("region")?,
            lo: f.content("lo")?,
            hi: f.content("hi")?,
        },
        "scheduled-notice" => ScheduledNotice {
            region: f.region("region")?,
            lo: f.content("lo")?,
            hi: f.content("hi")?,
            start: f.time("start")?,
        },
        _ => return Err("unknown record kind"),
    })
}

impl LogRecord {
    pub fn parse_line(line: &str) -> Result<LogRecord, &'static str> {
        let mut parts = line.split(' ');
        let time: SimTime = parts.next().ok_or("empty line")?.parse().map_err(|_| "malformed time")?;
        let kind = parts.next().ok_or("missing kind")?;
        let mut map = BTreeMap::new();
        for p in parts {
            let (k, v) = p.split_once('=').ok_or("field without '='")?;
            map.insert(k, v);
        }
        Ok(LogRecord { time, event: parse_event(kind, &Fields { map })? })
    }
}

/// Render records one per line, each terminated by `\n`.
pub fn render_log(records: &[LogRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{r}");
    }
    out
}

pub fn parse_log(text: &str) -> Result<Vec<LogRecord>, ParseError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| LogRecord::parse_line(l).map_err(|message| ParseError { line: i + 1, message }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn p(s: &str) -> ProviderId {
        ProviderId::new(s)
    }

    fn samples() -> Vec<LogRecord> {
        use LogEvent::*;
        let at = |us| SimTime(us);
        vec![
            LogRecord { time: at(1), event: Request { req: 0, content: ContentId(3), region: LocationId(1), server: p("o"), latency_ms: 80, sigma: false, load: 1.0 } },
            LogRecord { time: at(2), event: Penalty { provider: p("o"), content: ContentId(3), region: LocationId(1), load: 12.5, cost: 0.125 } },
            LogRecord { time: at(3), event: Predict { auction: 1, content: ContentId(3), duration: SimTime::from_secs(5), horizon: 40, empirical: 3.25, binomial: 0.1, zipf: 1e-7 } },
            LogRecord { time: at(3), event: AuctionOpened { auction: 1, buyer: p("o"), content: ContentId(3), region: LocationId(1), duration: SimTime::from_secs(300), retry: 0, renegotiation: false } },
            LogRecord { time: at(3), event: AuctionRefused { buyer: p("o"), content: ContentId(3), region: LocationId(1), budget: -2.5 } },
            LogRecord { time: at(3), event: BidRevealed { auction: 1, seller: p("s"), amount: Money(370), at: at(4) } },
            LogRecord { time: at(3), event: AuctionCleared { auction: 1, reserve: Money(800), outcome: "awarded".to_string(), winners: 1, payment: Money(700) } },
            LogRecord { time: at(3), event: AuctionRetry { auction: 1, duration: SimTime::from_secs(150), retry: 1 } },
            LogRecord { time: at(3), event: SlaRisk { buyer: p("o"), content: ContentId(3), region: LocationId(1) } },
            LogRecord { time: at(3), event: VoFormed { vo: VoId(2), kind: VoKind::LongTerm, buyer: p("o"), content: ContentId(3), expires: at(9), prev: Some(VoId(1)) } },
            LogRecord { time: at(3), event: VoFormed { vo: VoId(3), kind: VoKind::ShortTerm, buyer: p("o"), content: ContentId(3), expires: at(9), prev: None } },
            LogRecord { time: at(3), event: VoClosed { vo: VoId(2), reason: "expired".to_string() } },
            LogRecord { time: at(3), event: ReplicaPlaced { vo: VoId(2), provider: p("s"), content: ContentId(3), size_mb: 50.0, payment: Money(700), used_mb: 150.5 } },
            LogRecord { time: at(3), event: ReplicaTransferred { vo: VoId(2), provider: p("s"), content: ContentId(3), payment: Money(1) } },
            LogRecord { time: at(3), event: ReplicaEvicted { vo: VoId(2), provider: p("s"), content: ContentId(3), used_mb: 0.0 } },
            LogRecord { time: at(3), event: ReplicaExpired { vo: VoId(2), provider: p("s"), content: ContentId(3), used_mb: 0.0 } },
            LogRecord { time: at(3), event: ReplicaReleased { vo: VoId(2), provider: p("s"), content: ContentId(3), used_mb: 0.0 } },
            LogRecord { time: at(3), event: WinnerDropped { provider: p("s"), content: ContentId(3) } },
            LogRecord { time: at(3), event: PolicyDenied { buyer: p("o"), content: ContentId(3), rules: vec![0, 2] } },
            LogRecord { time: at(3), event: PolicyDenied { buyer: p("o"), content: ContentId(3), rules: vec![] } },
            LogRecord { time: at(3), event: Renegotiation { vo: VoId(2), kind: RenegotiationKind::CheaperEntrant, seller: p("e"), content: ContentId(3) } },
            LogRecord { time: at(3), event: FlashCrowd { phase: "start".to_string(), region: LocationId(1), lo: ContentId(1), hi: ContentId(5) } },
            LogRecord { time: at(3), event: ScheduledNotice { region: LocationId(1), lo: ContentId(1), hi: ContentId(5), start: at(99) } },
        ]
    }

    #[test]
    fn every_kind_round_trips() {
        let records = samples();
        let text = render_log(&records);
        assert_eq!(parse_log(&text).unwrap(), records);
        assert_eq!(render_log(&parse_log(&text).unwrap()), text);
    }

    #[test]
    fn request_line_layout() {
        let line = samples()[0].to_string();
        assert_eq!(line, "0.000001 request req=0 content=3 region=1 server=o latency_ms=80 sigma=0 load=1");
    }

    #[test]
    fn bad_lines_rejected() {
        assert!(parse_log("0.000001 bogus a=1").is_err());
        assert!(parse_log("x request").is_err());
        assert_eq!(parse_log("0.000001 sla-risk buyer=o content=1").unwrap_err().line, 1);
    }

    proptest! {
        #[test]
        fn reals_round_trip(load in proptest::num::f64::NORMAL | proptest::num::f64::ZERO, cost in -1e6f64..1e6) {
            let r = LogRecord {
                time: SimTime(5),
                event: LogEvent::Penalty { provider: p("o"), content: ContentId(1), region: LocationId(0), load, cost },
            };
            prop_assert_eq!(LogRecord::parse_line(&r.to_string()), Ok(r));
        }
    }
}
