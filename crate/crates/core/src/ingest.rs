//! Dataset readers, subsampling and synthetic generators.
//!
//! Edge lists are whitespace-separated integer pairs with `#` comments.
//! MovieLens files are `userId,movieId,rating,timestamp` and
//! `movieId,title,genres` (pipe-separated genres); a header row is detected
//! automatically. All readers accept CRLF line endings.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::objective::ElementId;
use crate::objectives::{Graph, RatingsModel, SparseVector};

/// Counts of input lines that were dropped or collapsed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub comment_lines: usize,
    pub self_loops: usize,
    pub duplicate_edges: usize,
    /// Ratings whose movie is missing from the movies file.
    pub dropped_ratings: usize,
}

/// Parses an edge list. Vertex ids are remapped to `0..n` in ascending order
/// of the original ids.
pub fn parse_snap_edges(reader: impl Read) -> Result<(Graph, IngestReport)> {
    let mut report = IngestReport::default();
    let mut raw = Vec::new();
    for (k, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = k + 1;
        let line = line?;
        let body = line.trim();
        if body.is_empty() {
            continue;
        }
        if body.starts_with('#') {
            report.comment_lines += 1;
            continue;
        }
        let mut tokens = body.split_whitespace();
        let mut endpoint = || -> Result<u64> {
            let token = tokens.next().ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected two endpoints, got `{body}`"),
            })?;
            token.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad vertex id `{token}`"),
            })
        };
        let u = endpoint()?;
        let v = endpoint()?;
        if tokens.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected two endpoints, got `{body}`"),
            });
        }
        raw.push((u, v));
    }
    let ids: BTreeSet<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    let index: HashMap<u64, u32> = ids.iter().enumerate().map(|(i, &id)| (id, i as u32)).collect();
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for (u, v) in raw {
        if u == v {
            report.self_loops += 1;
            continue;
        }
        let (a, b) = (index[&u.min(v)], index[&u.max(v)]);
        if !seen.insert((a, b)) {
            report.duplicate_edges += 1;
            continue;
        }
        edges.push((a, b));
    }
    Ok((Graph::from_edges(ids.len(), edges), report))
}

pub fn load_snap_edges(path: &Path) -> Result<(Graph, IngestReport)> {
    parse_snap_edges(File::open(path)?)
}

fn csv_reader(reader: impl Read) -> csv::Reader<impl Read> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, i: usize, what: &str) -> Result<T> {
    let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
    let raw = record.get(i).ok_or_else(|| Error::Parse {
        line,
        message: format!("missing {what} column"),
    })?;
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad {what} `{raw}`"),
    })
}

/// Whether the first record is a header (its first field is not numeric).
fn is_header(record: &csv::StringRecord) -> bool {
    record.get(0).is_some_and(|f| f.parse::<f64>().is_err())
}

/// Builds a ratings model from MovieLens-style readers. Movies keep the
/// order of the movies file.
pub fn parse_movielens(ratings: impl Read, movies: impl Read) -> Result<(RatingsModel, IngestReport)> {
    let mut report = IngestReport::default();
    let mut ids = Vec::new();
    let mut genres = Vec::new();
    let mut index: HashMap<u64, ElementId> = HashMap::new();
    for (k, record) in csv_reader(movies).records().enumerate() {
        let record = record.map_err(csv_error)?;
        if k == 0 && is_header(&record) {
            continue;
        }
        let id: u64 = field(&record, 0, "movieId")?;
        let labels: String = field(&record, 2, "genres")?;
        if index.insert(id, ids.len() as ElementId).is_some() {
            let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
            return Err(Error::Parse {
                line,
                message: format!("movie {id} listed twice"),
            });
        }
        ids.push(id);
        genres.push(
            labels
                .split('|')
                .map(str::trim)
                .filter(|g| !g.is_empty())
                .map(String::from)
                .collect::<BTreeSet<_>>(),
        );
    }

    let mut triples = Vec::new();
    for (k, record) in csv_reader(ratings).records().enumerate() {
        let record = record.map_err(csv_error)?;
        if k == 0 && is_header(&record) {
            continue;
        }
        let user: u32 = field(&record, 0, "userId")?;
        let movie: u64 = field(&record, 1, "movieId")?;
        let rating: f64 = field(&record, 2, "rating")?;
        match index.get(&movie) {
            Some(&m) => triples.push((m, user, rating)),
            None => report.dropped_ratings += 1,
        }
    }
    let r_avg = if triples.is_empty() {
        0.0
    } else {
        triples.iter().map(|t| t.2).sum::<f64>() / triples.len() as f64
    };
    let mut per_movie: Vec<Vec<(u32, f64)>> = vec![Vec::new(); ids.len()];
    let mut user_ratings: BTreeMap<u32, Vec<ElementId>> = BTreeMap::new();
    for &(m, user, rating) in &triples {
        per_movie[m as usize].push((user, rating - r_avg));
        user_ratings.entry(user).or_default().push(m);
    }
    for list in user_ratings.values_mut() {
        list.sort_unstable();
        list.dedup();
    }
    Ok((
        RatingsModel {
            movies: ids,
            vectors: per_movie.into_iter().map(SparseVector::new).collect(),
            genres,
            r_avg,
            user_ratings,
        },
        report,
    ))
}

pub fn load_movielens(ratings: &Path, movies: &Path) -> Result<(RatingsModel, IngestReport)> {
    parse_movielens(File::open(ratings)?, File::open(movies)?)
}

/// How much of a dataset to keep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sample {
    Fraction(f64),
    Cap(usize),
}

/// Seeded subset of `0..n`, ascending.
pub fn sample_indices(n: usize, sample: Sample, seed: u64) -> Result<Vec<u32>> {
    let keep = match sample {
        Sample::Fraction(f) => {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::InvalidArgument(format!("fraction must be in (0, 1], got {f}")));
            }
            ((f * n as f64).round() as usize).min(n)
        }
        Sample::Cap(c) => c.min(n),
    };
    if keep == n {
        return Ok((0..n as u32).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<u32> = rand::seq::index::sample(&mut rng, n, keep)
        .into_iter()
        .map(|i| i as u32)
        .collect();
    picked.sort_unstable();
    Ok(picked)
}

/// Induced subgraph on a seeded vertex sample; returns the kept original ids.
pub fn subsample_graph(graph: &Graph, sample: Sample, seed: u64) -> Result<(Graph, Vec<u32>)> {
    let kept = sample_indices(graph.vertex_count(), sample, seed)?;
    Ok((graph.induced(&kept), kept))
}

/// Seeded movie sample with the matching ratings.
pub fn subsample_movies(model: &RatingsModel, sample: Sample, seed: u64) -> Result<RatingsModel> {
    let kept = sample_indices(model.len(), sample, seed)?;
    Ok(model.restrict(&kept))
}

/// Picks a user uniformly at random among those with at least
/// `min_ratings` rated movies; returns the user and the rated movies.
pub fn pick_user(model: &RatingsModel, min_ratings: usize, seed: u64) -> Result<(u32, Vec<ElementId>)> {
    let eligible: Vec<(&u32, &Vec<ElementId>)> = model
        .user_ratings
        .iter()
        .filter(|(_, rated)| rated.len() >= min_ratings)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    eligible
        .choose(&mut rng)
        .map(|(&u, rated)| (u, rated.to_vec()))
        .ok_or_else(|| {
            Error::InvalidInstance(format!("no user has at least {min_ratings} ratings"))
        })
}

/// Social-network-like graph: preferential attachment with triad closure.
///
/// Each new vertex links to `links` targets; the first is chosen by degree,
/// each further one closes a triangle with probability `triad` (a random
/// neighbour of the previous target) and is otherwise chosen by degree.
pub fn synthetic_social_graph(n: usize, links: usize, triad: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let core = (links + 1).min(n);
    let mut adjacency: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    let mut ends: Vec<u32> = Vec::new();
    for u in 0..core as u32 {
        for v in 0..u {
            adjacency[u as usize].insert(v);
            adjacency[v as usize].insert(u);
            ends.extend([u, v]);
        }
    }
    for u in core as u32..n as u32 {
        let mut previous: Option<u32> = None;
        let mut added = 0;
        let mut attempts = 0;
        while added < links && attempts < 20 * links {
            attempts += 1;
            let target = match previous {
                Some(p) if rng.gen_bool(triad) => {
                    let nbrs: Vec<u32> = adjacency[p as usize].iter().copied().collect();
                    *nbrs.choose(&mut rng).expect("target has neighbours")
                }
                _ => ends[rng.gen_range(0..ends.len())],
            };
            if target == u || adjacency[u as usize].contains(&target) {
                continue;
            }
            adjacency[u as usize].insert(target);
            adjacency[target as usize].insert(u);
            ends.extend([u, target]);
            previous = Some(target);
            added += 1;
        }
    }
    let edges = adjacency
        .iter()
        .enumerate()
        .flat_map(|(u, set)| set.iter().map(move |&v| (u as u32, v)))
        .filter(|(u, v)| u < v)
        .collect::<Vec<_>>();
    Graph::from_edges(n, edges)
}

/// The genre vocabulary used by [`synthetic_ratings`].
pub const GENRES: [&str; 10] = [
    "Action", "Adventure", "Comedy", "Drama", "Fantasy", "Horror", "Romance", "Sci-Fi",
    "Thriller", "Documentary",
];

/// Ratings from a low-rank taste model: users and movies get random
/// factor vectors, a user rates a random subset of movies and the rating is
/// the rounded, clipped affinity on a 1–5 scale.
pub fn synthetic_ratings(movies: usize, users: usize, per_user: usize, seed: u64) -> RatingsModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rank = 4;
    let factor = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..rank).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let movie_factors: Vec<Vec<f64>> = (0..movies).map(|_| factor(&mut rng)).collect();
    let genres: Vec<BTreeSet<String>> = (0..movies)
        .map(|_| {
            let count = rng.gen_range(1..=3);
            GENRES
                .choose_multiple(&mut rng, count)
                .map(|g| g.to_string())
                .collect()
        })
        .collect();
    let mut triples = Vec::new();
    for user in 0..users as u32 {
        let taste = factor(&mut rng);
        let count = per_user.min(movies);
        let mut rated: Vec<usize> = rand::seq::index::sample(&mut rng, movies, count).into_vec();
        rated.sort_unstable();
        for m in rated {
            let affinity: f64 = taste.iter().zip(&movie_factors[m]).map(|(a, b)| a * b).sum();
            let noise: f64 = rng.gen_range(-0.5..0.5);
            let rating = (3.0 + 1.5 * affinity + noise).round().clamp(1.0, 5.0);
            triples.push((m, user, rating));
        }
    }
    let r_avg = if triples.is_empty() {
        0.0
    } else {
        triples.iter().map(|t| t.2).sum::<f64>() / triples.len() as f64
    };
    let mut per_movie: Vec<Vec<(u32, f64)>> = vec![Vec::new(); movies];
    let mut user_ratings: BTreeMap<u32, Vec<ElementId>> = BTreeMap::new();
    for &(m, user, rating) in &triples {
        per_movie[m].push((user, rating - r_avg));
        user_ratings.entry(user).or_default().push(m as ElementId);
    }
    RatingsModel {
        movies: (0..movies as u64).collect(),
        vectors: per_movie.into_iter().map(SparseVector::new).collect(),
        genres,
        r_avg,
        user_ratings,
    }
}
