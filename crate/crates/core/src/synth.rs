//! Seeded synthetic datasets in the input file formats.
//!
//! Users belong to communities that fix most of their country, language,
//! age range and genre tastes, and they mostly follow inside their own
//! community. Popularity and activity are heavy tailed. Each action is made
//! for one community, starts from a few spontaneous adopters there and
//! spreads along follower arcs, more readily to followers whose tastes and
//! language match it.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bumped whenever the same config would produce different files.
pub const GENERATOR_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub users: usize,
    pub actions: usize,
    pub seed: u64,
    /// Mean number of accounts each user follows.
    pub mean_follows: f64,
    /// Pareto shape of popularity and activity; smaller is more skewed.
    pub skew: f64,
    /// Base probability that a follower adopts an action from one adopter.
    pub adoption: f64,
    /// Number of communities; users mostly follow inside their own.
    pub communities: usize,
    /// Probability that a follow or a spontaneous adopter stays inside the
    /// community.
    pub homophily: f64,
    /// Spontaneous adopters seeded per action.
    pub spontaneous: usize,
    /// Adoption multiplier when the action has one of the follower's genres.
    pub taste_boost: f64,
    /// Adoption multiplier when the action is in the follower's language.
    pub language_boost: f64,
    pub genres: usize,
    pub countries: usize,
    pub occupations: usize,
    pub languages: usize,
    pub studios: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            users: 5_000,
            actions: 2_000,
            seed: 1,
            mean_follows: 6.0,
            skew: 1.3,
            adoption: 0.07,
            communities: 10,
            homophily: 0.8,
            spontaneous: 4,
            taste_boost: 4.0,
            language_boost: 1.5,
            genres: 16,
            countries: 12,
            occupations: 20,
            languages: 6,
            studios: 60,
        }
    }
}

/// Generated file contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthData {
    pub graph: String,
    pub actions: String,
    pub user_attrs: String,
    pub action_attrs: String,
}

impl SynthData {
    pub const GRAPH_FILE: &'static str = "graph.tsv";
    pub const ACTIONS_FILE: &'static str = "actions.tsv";
    pub const USER_ATTRS_FILE: &'static str = "users.attrs.tsv";
    pub const ACTION_ATTRS_FILE: &'static str = "actions.attrs.tsv";

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, body) in [
            (Self::GRAPH_FILE, &self.graph),
            (Self::ACTIONS_FILE, &self.actions),
            (Self::USER_ATTRS_FILE, &self.user_attrs),
            (Self::ACTION_ATTRS_FILE, &self.action_attrs),
        ] {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

struct Community {
    country: usize,
    language: usize,
    female: f64,
    age: f64,
    genres: Vec<usize>,
}

struct User {
    community: usize,
    gender: Option<usize>,
    age: u32,
    country: usize,
    occupation: usize,
    language: usize,
    tastes: [usize; 2],
}

struct Action {
    genres: Vec<usize>,
    year: u32,
    rating: u32,
    language: usize,
    studio: usize,
}

fn pareto<R: Rng>(rng: &mut R, shape: f64) -> f64 {
    let u: f64 = rng.gen_range(0.0..1.0);
    (1.0 - u).powf(-1.0 / shape)
}

fn zipf_weights(n: usize, s: f64) -> Vec<f64> {
    (1..=n).map(|r| 1.0 / (r as f64).powf(s)).collect()
}

fn shuffled<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        v.swap(i, rng.gen_range(0..=i));
    }
    v
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthData> {
    if cfg.users < 2
        || cfg.genres < 2
        || cfg.communities == 0
        || cfg.countries == 0
        || cfg.occupations == 0
        || cfg.languages == 0
        || cfg.studios == 0
    {
        return Err(Error::InvalidArgument(
            "synthetic config needs at least 2 users, 2 genres, one community and one value per attribute".into(),
        ));
    }
    let unit = 0.0..=1.0;
    if cfg.skew.is_nan() || cfg.skew <= 0.0
        || !unit.contains(&cfg.adoption)
        || !unit.contains(&cfg.homophily)
        || cfg.mean_follows < 0.0
        || cfg.taste_boost < 0.0
        || cfg.language_boost < 0.0
    {
        return Err(Error::InvalidArgument("synthetic config has an out-of-range parameter".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let header = format!("# proxi synthetic v{GENERATOR_VERSION} seed={}\n", cfg.seed);

    let genre_zipf = WeightedIndex::new(zipf_weights(cfg.genres, 1.0)).unwrap();
    let country_dist = WeightedIndex::new(zipf_weights(cfg.countries, 1.2)).unwrap();
    let studio_dist = WeightedIndex::new(zipf_weights(cfg.studios, 1.0)).unwrap();
    let language_dist = WeightedIndex::new(zipf_weights(cfg.languages, 1.5)).unwrap();
    let community_dist = WeightedIndex::new(zipf_weights(cfg.communities, 0.8)).unwrap();

    let communities: Vec<Community> = (0..cfg.communities)
        .map(|_| {
            let country = country_dist.sample(&mut rng);
            Community {
                country,
                language: if rng.gen_bool(0.7) { country % cfg.languages } else { language_dist.sample(&mut rng) },
                female: rng.gen_range(0.25..0.85),
                age: rng.gen_range(18.0..50.0),
                genres: shuffled(&mut rng, cfg.genres),
            }
        })
        .collect();

    let users: Vec<User> = (0..cfg.users)
        .map(|_| {
            let community = community_dist.sample(&mut rng);
            let c = &communities[community];
            let gender = if rng.gen_bool(0.05) { None } else { Some(rng.gen_bool(c.female) as usize) };
            let spread = rng.gen_range(-8.0..8.0) + rng.gen_range(-8.0..8.0);
            let age = (c.age + spread).clamp(13.0, 80.0) as u32;
            let country = if rng.gen_bool(0.85) { c.country } else { country_dist.sample(&mut rng) };
            let language = if rng.gen_bool(0.9) { c.language } else { language_dist.sample(&mut rng) };
            let first = c.genres[genre_zipf.sample(&mut rng)];
            let mut second = c.genres[genre_zipf.sample(&mut rng)];
            while second == first {
                second = c.genres[genre_zipf.sample(&mut rng)];
            }
            User {
                community,
                gender,
                age,
                country,
                occupation: rng.gen_range(0..cfg.occupations),
                language,
                tastes: [first, second],
            }
        })
        .collect();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); cfg.communities];
    for (i, u) in users.iter().enumerate() {
        members[u.community].push(i);
    }

    let popularity: Vec<f64> = (0..cfg.users).map(|_| pareto(&mut rng, cfg.skew)).collect();
    let activity: Vec<f64> = popularity
        .iter()
        .map(|&p| p.sqrt() * pareto(&mut rng, cfg.skew + 1.0))
        .collect();
    let weighted = |ids: &[usize], w: &[f64]| WeightedIndex::new(ids.iter().map(|&i| w[i])).ok();

    // followers[u] = users following u.
    let follow_all = WeightedIndex::new(&popularity).unwrap();
    let follow_within: Vec<Option<WeightedIndex<f64>>> = members.iter().map(|m| weighted(m, &popularity)).collect();
    let mut followers: Vec<Vec<usize>> = vec![Vec::new(); cfg.users];
    let mut graph = header.clone();
    #[allow(clippy::needless_range_loop)]
    for v in 0..cfg.users {
        let want = rng.gen_range(0.0..(2.0 * cfg.mean_follows)).round() as usize;
        let want = want.min(cfg.users - 1);
        let own = users[v].community;
        let mut chosen = HashSet::new();
        let mut tries = 0;
        while chosen.len() < want && tries < 20 * want {
            tries += 1;
            let u = match &follow_within[own] {
                Some(d) if rng.gen_bool(cfg.homophily) => members[own][d.sample(&mut rng)],
                _ => follow_all.sample(&mut rng),
            };
            if u != v {
                chosen.insert(u);
            }
        }
        let mut chosen: Vec<usize> = chosen.into_iter().collect();
        chosen.sort_unstable();
        for u in chosen {
            followers[u].push(v);
            writeln!(graph, "{u}\t{v}").unwrap();
        }
    }

    // Each action is made for one community and seeded there.
    let seed_within: Vec<Option<WeightedIndex<f64>>> = members.iter().map(|m| weighted(m, &activity)).collect();
    let seed_all = WeightedIndex::new(&activity).unwrap();
    let mut actions = Vec::with_capacity(cfg.actions);
    let mut origins = Vec::with_capacity(cfg.actions);
    for _ in 0..cfg.actions {
        let home = community_dist.sample(&mut rng);
        let c = &communities[home];
        let first = c.genres[genre_zipf.sample(&mut rng)];
        let mut genres = vec![first];
        if rng.gen_bool(0.4) {
            let second = rng.gen_range(0..cfg.genres);
            if second != first {
                genres.push(second);
            }
        }
        actions.push(Action {
            genres,
            year: rng.gen_range(1950..=2012),
            rating: (rng.gen_range(1..=10u32) + rng.gen_range(1..=10)).div_ceil(2),
            language: if rng.gen_bool(0.7) { c.language } else { language_dist.sample(&mut rng) },
            studio: studio_dist.sample(&mut rng),
        });
        origins.push(home);
    }

    let mut log = header.clone();
    let mut adopted: HashMap<usize, u64> = HashMap::new();
    let mut queue: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
    for (a, action) in actions.iter().enumerate() {
        adopted.clear();
        for _ in 0..cfg.spontaneous {
            let u = match &seed_within[origins[a]] {
                Some(d) if rng.gen_bool(cfg.homophily) => members[origins[a]][d.sample(&mut rng)],
                _ => seed_all.sample(&mut rng),
            };
            queue.push(Reverse((rng.gen_range(0..1_000), u)));
        }
        while let Some(Reverse((t, u))) = queue.pop() {
            if adopted.contains_key(&u) {
                continue;
            }
            adopted.insert(u, t);
            for &v in &followers[u] {
                if adopted.contains_key(&v) {
                    continue;
                }
                let fv = &users[v];
                let mut p = cfg.adoption;
                if action.genres.iter().any(|g| fv.tastes.contains(g)) {
                    p *= cfg.taste_boost;
                }
                if action.language == fv.language {
                    p *= cfg.language_boost;
                }
                if rng.gen_bool(p.min(1.0)) {
                    queue.push(Reverse((t + rng.gen_range(1..=60), v)));
                }
            }
        }
        let mut rows: Vec<(u64, usize)> = adopted.iter().map(|(&u, &t)| (t, u)).collect();
        rows.sort_unstable();
        for (t, u) in rows {
            writeln!(log, "{u}\tm{a}\t{t}").unwrap();
        }
    }

    let mut user_attrs = header.clone();
    user_attrs.push_str("#numeric: age\n#single: gender,country,occupation,language\n");
    for (id, u) in users.iter().enumerate() {
        if let Some(g) = u.gender {
            writeln!(user_attrs, "{id}\tgender\t{}", ["male", "female"][g]).unwrap();
        }
        writeln!(user_attrs, "{id}\tage\t{}", u.age).unwrap();
        writeln!(user_attrs, "{id}\tcountry\tc{}", u.country).unwrap();
        writeln!(user_attrs, "{id}\toccupation\tjob{}", u.occupation).unwrap();
        writeln!(user_attrs, "{id}\tlanguage\tlang{}", u.language).unwrap();
    }

    let mut action_attrs = header;
    action_attrs.push_str("#numeric: year,rating\n#single: language,studio\n");
    for (a, act) in actions.iter().enumerate() {
        for g in &act.genres {
            writeln!(action_attrs, "m{a}\tgenre\tg{g}").unwrap();
        }
        writeln!(action_attrs, "m{a}\tyear\t{}", act.year).unwrap();
        writeln!(action_attrs, "m{a}\trating\t{}", act.rating).unwrap();
        writeln!(action_attrs, "m{a}\tlanguage\tlang{}", act.language).unwrap();
        writeln!(action_attrs, "m{a}\tstudio\ts{}", act.studio).unwrap();
    }

    Ok(SynthData {
        graph,
        actions: log,
        user_attrs,
        action_attrs,
    })
}
