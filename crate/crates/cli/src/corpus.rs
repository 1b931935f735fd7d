//! The example corpus, compiled into the binary. Arguments of the form
//! `corpus:NAME` refer to these files.

macro_rules! corpus {
    ($($name:literal),* $(,)?) => {
        pub const FILES: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../../../corpus/", $name, ".tst")))),*
        ];
    };
}

corpus!(
    "alice",
    "cyclic_receiver",
    "cyclic_sender",
    "echo",
    "echo_partner",
    "late_receiver",
    "late_sender",
    "looping_reader",
    "paynow",
    "paynow_customer",
    "paypal",
    "prompt_sender",
    "relay",
    "relay_fast",
    "relay_slow",
    "retry",
    "retry_partner",
    "split_sender",
    "weather_client",
    "weather_client_hasty",
    "weather_service",
    "window_receiver",
    "window_sender",
    "zeno_receiver",
    "zeno_sender",
);

/// Expected verdicts: left, right, compliant.
pub const PAIRS: &str = include_str!("../../../corpus/pairs.txt");

pub fn get(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, src)| *src)
}

pub fn pairs() -> Vec<(&'static str, &'static str, bool)> {
    PAIRS
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            match f.as_slice() {
                [a, b, v] => Some((*a, *b, *v == "compliant")),
                _ => None,
            }
        })
        .collect()
}
