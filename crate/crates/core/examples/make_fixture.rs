//! Writes the synthetic fixture corpus used by the tests and the README.
//!
//! Two camps of ordinary users interact mostly among themselves, each camp
//! follows its own party accounts, and a handful of journalists talk to
//! both. A few posts are in the wrong language, off topic or outside the
//! study window so the filter has something to drop.
//!
//! Usage: cargo run -p discourse-core --example make_fixture -- <dir>

use std::fs;
use std::path::PathBuf;

use chrono::{Duration, TimeZone, Utc};
use discourse_core::corpus::{write_tweets, Media, MediaKind, PostKind, TweetRecord};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BLOCK: usize = 40;
const DAYS: i64 = 14;
const POSTS_PER_DAY: usize = 60;
const CROSS_P: f64 = 0.02;

const WORDS: &[&str] = &[
    "κυβέρνηση",
    "παρακολούθηση",
    "δημοκρατία",
    "εξεταστική",
    "βουλή",
    "δημοσιογράφος",
    "ΕΥΠ",
    "σκάνδαλο",
    "αλήθεια",
    "θεσμοί",
    "κράτος",
    "δικαιοσύνη",
    "τηλέφωνο",
    "λογοδοσία",
];
const TAGS: &[&str] = &[
    "#υποκλοπες",
    "#Υποκλοπές",
    "#predatorgate",
    "#παρακολουθήσεις",
];

fn main() {
    let dir: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fixtures/synthetic"));
    fs::create_dir_all(&dir).expect("create fixture dir");
    let mut rng = ChaCha8Rng::seed_from_u64(20220801);

    let left: Vec<String> = (0..BLOCK).map(|i| format!("uL{i:03}")).collect();
    let right: Vec<String> = (0..BLOCK).map(|i| format!("uR{i:03}")).collect();
    let media: Vec<String> = (0..4).map(|i| format!("mj{i}")).collect();
    let parties_l = ["pL1", "pL2", "pL3"];
    let parties_r = ["pR1", "pR2", "pR3"];

    let mut ann = String::from("user_id,category,side\n");
    for p in parties_l {
        ann.push_str(&format!("{p},Political,Left\n"));
    }
    for p in parties_r {
        ann.push_str(&format!("{p},Political,Right\n"));
    }
    ann.push_str("pC1,Political,Center\n");
    for m in &media {
        ann.push_str(&format!("{m},MediaJournalist,\n"));
    }
    ann.push_str("org1,Organization,\nbot1,Bot,\nuL000,Individual,\n");
    fs::write(dir.join("annotations.csv"), ann).unwrap();

    let mut follows = String::from("follower_id,followed_political_id\n");
    let mut follow_some = |user: &str, own: &[&str], other: &[&str], rng: &mut ChaCha8Rng| {
        let n = rng.gen_range(1..=own.len());
        let mut picks: Vec<&str> = own.choose_multiple(rng, n).copied().collect();
        if rng.gen_bool(0.25) {
            picks.push(other.choose(rng).unwrap());
        }
        if rng.gen_bool(0.1) {
            picks.push("pC1");
        }
        picks.sort();
        for p in picks {
            follows.push_str(&format!("{user},{p}\n"));
        }
    };
    for (i, u) in left.iter().enumerate() {
        // a few users follow nobody and stay Neutral
        if i % 10 != 9 {
            follow_some(u, &parties_l, &parties_r, &mut rng);
        }
    }
    for (i, u) in right.iter().enumerate() {
        if i % 10 != 9 {
            follow_some(u, &parties_r, &parties_l, &mut rng);
        }
    }
    for m in &media {
        follows.push_str(&format!("{m},pC1\n"));
    }
    fs::write(dir.join("follows.csv"), follows).unwrap();

    let start = Utc.with_ymd_and_hms(2022, 8, 1, 6, 0, 0).unwrap();
    let mut tweets = Vec::new();
    let mut next_id = 1000u64;
    let mut post = |author: &str,
                    kind: PostKind,
                    refs: Vec<String>,
                    day: i64,
                    rng: &mut ChaCha8Rng,
                    lang: &str,
                    text: String| {
        next_id += 1;
        let mut media_list = Vec::new();
        if rng.gen_bool(0.1) {
            media_list.push(Media {
                kind: if rng.gen_bool(0.7) {
                    MediaKind::Image
                } else {
                    MediaKind::Video
                },
                url: format!("https://media.example/{}", rng.gen_range(0..12)),
            });
        }
        let urls = if rng.gen_bool(0.2) {
            vec![format!(
                "https://news.example/article/{}",
                rng.gen_range(0..15)
            )]
        } else {
            vec![]
        };
        TweetRecord {
            tweet_id: next_id.to_string(),
            author_id: author.to_string(),
            timestamp: start + Duration::days(day) + Duration::minutes(rng.gen_range(0..16 * 60)),
            text,
            lang: lang.to_string(),
            kind,
            hashtags: vec![],
            urls,
            media: media_list,
            referenced_tweet_id: (kind != PostKind::Original).then(|| format!("{}", next_id - 1)),
            referenced_user_ids: refs,
            like_count: rng.gen_range(0..50),
            retweet_count: rng.gen_range(0..20),
            reply_count: rng.gen_range(0..10),
        }
    };
    let sentence = |rng: &mut ChaCha8Rng| {
        let mut w: Vec<&str> = WORDS.choose_multiple(rng, 4).copied().collect();
        w.push(TAGS.choose(rng).unwrap());
        w.join(" ")
    };

    for day in 0..DAYS {
        for _ in 0..POSTS_PER_DAY {
            let from_left = rng.gen_bool(0.5);
            let (own, other, parties) = if from_left {
                (&left, &right, &parties_l)
            } else {
                (&right, &left, &parties_r)
            };
            let author = own.choose(&mut rng).unwrap().clone();
            let target = if rng.gen_bool(CROSS_P) {
                other.choose(&mut rng).unwrap().clone()
            } else if rng.gen_bool(0.1) {
                parties.choose(&mut rng).unwrap().to_string()
            } else {
                own.choose(&mut rng).unwrap().clone()
            };
            if target == author {
                continue;
            }
            let kind = *[
                PostKind::Retweet,
                PostKind::Reply,
                PostKind::Quote,
                PostKind::Original,
            ]
            .choose(&mut rng)
            .unwrap();
            let text = sentence(&mut rng);
            let text = if kind == PostKind::Original {
                format!("@{target} {text}")
            } else {
                text
            };
            tweets.push(post(&author, kind, vec![target], day, &mut rng, "el", text));
        }
        // journalists talk to both camps
        for m in &media {
            for camp in [&left, &right] {
                let target = camp.choose(&mut rng).unwrap().clone();
                let text = sentence(&mut rng);
                tweets.push(post(
                    m,
                    PostKind::Reply,
                    vec![target],
                    day,
                    &mut rng,
                    "el",
                    text,
                ));
            }
        }
        // an original post with no interaction
        let lonely = format!("uL{:03}", 39 - day as usize % 3);
        let text = sentence(&mut rng);
        tweets.push(post(
            &lonely,
            PostKind::Original,
            vec![],
            day,
            &mut rng,
            "el",
            text,
        ));
    }
    // posts the filter drops
    let text = "phone tapping news #predatorgate".to_string();
    tweets.push(post(
        "uL001",
        PostKind::Original,
        vec![],
        2,
        &mut rng,
        "en",
        text,
    ));
    let text = "καλό ταξίδι σε όλους".to_string();
    tweets.push(post(
        "uR001",
        PostKind::Original,
        vec![],
        3,
        &mut rng,
        "el",
        text,
    ));
    let text = "#υποκλοπες πολύ αργότερα".to_string();
    tweets.push(post(
        "uR002",
        PostKind::Original,
        vec![],
        200,
        &mut rng,
        "el",
        text,
    ));

    tweets.sort_by(|a, b| {
        a.timestamp
            .cmp(&b.timestamp)
            .then(a.tweet_id.cmp(&b.tweet_id))
    });
    let mut buf = Vec::new();
    write_tweets(&mut buf, &tweets).unwrap();
    // one malformed line, skipped with a warning
    buf.extend_from_slice(b"{\"tweet_id\": \"broken\"\n");
    fs::write(dir.join("tweets.jsonl"), buf).unwrap();

    fs::write(
        dir.join("config.toml"),
        "tweets = \"tweets.jsonl\"\n\
         annotations = \"annotations.csv\"\n\
         follows = \"follows.csv\"\n\
         out_dir = \"out\"\n\
         from = \"2022-08-01\"\n\
         to = \"2022-08-14\"\n\
         threshold = 0.0\n\
         sweep_thresholds = [0.0, 0.5, 0.7]\n\
         k = 10\n\
         prevalent_top_k = 10\n\
         both_isolated_modes = true\n",
    )
    .unwrap();
    println!("wrote {} posts to {}", tweets.len(), dir.display());
}
