//! JSON interchange formats. Every file carries a `"format": 1` version
//! field. Cone ids refer to the canonical ordering of the parsed fan
//! (ascending dimension, then rays); `poset --json` prints the assignment.

use exodromy::fan::{Cone, ConeId, Fan};
use exodromy::fundcat::{build_fundamental_category, finite_level, GaloisDatum};
use exodromy::intlat::IntMatrix;
use exodromy::perm::Perm;
use exodromy::sheafcalc::{ConstructibleSheaf, Site, StratumLocalSystem};
use exodromy::tame::{CharacterSurjection, FiniteAbelianGroup, KummerCoverSpec};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

pub const FORMAT: u32 = 1;

#[derive(Debug)]
pub struct ParseError(pub String);

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError(msg.into()))
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct FanFile {
    pub format: u32,
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    /// Lists of ray indices; faces and the zero cone are implicit.
    pub cones: Vec<Vec<usize>>,
}

pub struct ParsedFan {
    pub fan: Fan,
    pub warnings: Vec<String>,
}

pub fn fan_from_file(file: &FanFile) -> Result<ParsedFan, ParseError> {
    if file.format != FORMAT {
        return err(format!("unsupported format {} (expected {FORMAT})", file.format));
    }
    let mut warnings = Vec::new();
    for (i, ray) in file.rays.iter().enumerate() {
        if ray.len() != file.rank {
            return err(format!("ray {i} has {} entries, rank is {}", ray.len(), file.rank));
        }
    }
    let mut generators = Vec::new();
    for (ci, cone) in file.cones.iter().enumerate() {
        let mut rays = Vec::new();
        for &ri in cone {
            let Some(ray) = file.rays.get(ri) else {
                return err(format!("cone {ci} refers to missing ray {ri}"));
            };
            rays.push(ray.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
        }
        let (cone, changed) = Cone::new_reporting(file.rank, rays)
            .map_err(|e| ParseError(format!("cone {ci}: {e}")))?;
        if changed {
            warnings.push(format!("cone {ci}: generators normalized to primitive extreme rays"));
        }
        generators.push(cone);
    }
    Ok(ParsedFan { fan: Fan::generated_by(file.rank, generators), warnings })
}

pub fn fan_to_file(fan: &Fan) -> FanFile {
    let mut ray_index: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    let mut rays: Vec<Vec<i64>> = Vec::new();
    let mut cones = Vec::new();
    for cone in fan.cones() {
        if cone.is_zero() {
            continue;
        }
        let mut indices = Vec::new();
        for ray in cone.rays() {
            let key: Vec<i64> = ray.iter().map(|x| x.to_i64().expect("desk-scale ray")).collect();
            let idx = *ray_index.entry(key.clone()).or_insert_with(|| {
                rays.push(key.clone());
                rays.len() - 1
            });
            indices.push(idx);
        }
        cones.push(indices);
    }
    FanFile { format: FORMAT, rank: fan.rank(), rays, cones }
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug)]
pub struct GaloisHeader {
    pub level: u64,
    pub frob: u64,
    #[serde(default)]
    pub char: u64,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct StalkEntry {
    pub cone: ConeId,
    pub size: usize,
    /// One permutation (one-line notation) per ambient lattice generator.
    pub monodromy: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frobenius: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct StructureEntry {
    pub from: ConeId,
    pub to: ConeId,
    pub map: Vec<usize>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SheafFile {
    pub format: u32,
    pub fan: FanFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub galois: Option<GaloisHeader>,
    /// Defaults to every cone of the fan.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<ConeId>>,
    pub stalks: Vec<StalkEntry>,
    pub structure: Vec<StructureEntry>,
}

pub fn site_for(fan: &Fan, galois: Option<GaloisHeader>) -> Result<Arc<Site>, ParseError> {
    let cat = build_fundamental_category(fan).map_err(|e| ParseError(e.to_string()))?;
    Ok(Arc::new(match galois {
        None => Site::Complex(cat),
        Some(h) => {
            let datum = GaloisDatum::new(h.level, h.frob, h.char)
                .map_err(|e| ParseError(e.to_string()))?;
            Site::Tame(finite_level(&cat, datum).map_err(|e| ParseError(e.to_string()))?)
        }
    }))
}

fn perm_from_line(images: &[usize], size: usize, what: &str) -> Result<Perm, ParseError> {
    if images.len() != size {
        return err(format!("{what}: permutation has length {}, stalk size is {size}", images.len()));
    }
    Perm::from_images(images.to_vec())
        .ok_or_else(|| ParseError(format!("{what}: not a permutation")))
}

pub struct ParsedSheaf {
    pub site: Arc<Site>,
    pub sheaf: ConstructibleSheaf,
    pub warnings: Vec<String>,
}

pub fn sheaf_from_file(file: &SheafFile) -> Result<ParsedSheaf, ParseError> {
    if file.format != FORMAT {
        return err(format!("unsupported format {} (expected {FORMAT})", file.format));
    }
    let parsed = fan_from_file(&file.fan)?;
    let site = site_for(&parsed.fan, file.galois)?;
    let rank = site.rank();
    let domain: BTreeSet<ConeId> = match &file.domain {
        Some(d) => d.iter().copied().collect(),
        None => site.poset().all_objects(),
    };
    let mut carrier = BTreeMap::new();
    let mut monodromy = BTreeMap::new();
    let mut frobenius = BTreeMap::new();
    for stalk in &file.stalks {
        let s = stalk.cone;
        if stalk.monodromy.len() != rank {
            return err(format!(
                "cone {s}: needs {rank} monodromy permutations, got {}",
                stalk.monodromy.len()
            ));
        }
        carrier.insert(s, stalk.size);
        let perms = stalk
            .monodromy
            .iter()
            .enumerate()
            .map(|(i, line)| perm_from_line(line, stalk.size, &format!("cone {s}, generator {i}")))
            .collect::<Result<Vec<_>, _>>()?;
        monodromy.insert(s, perms);
        match (&file.galois, &stalk.frobenius) {
            (Some(_), Some(line)) => {
                frobenius.insert(s, perm_from_line(line, stalk.size, &format!("cone {s}, Frobenius"))?);
            }
            (Some(_), None) => return err(format!("cone {s}: finite-level stalk needs Frobenius")),
            (None, Some(_)) => {
                return err(format!("cone {s}: Frobenius data without a galois header"))
            }
            (None, None) => {}
        }
    }
    let mut structure = BTreeMap::new();
    for entry in &file.structure {
        structure.insert((entry.from, entry.to), entry.map.clone());
    }
    let sheaf =
        ConstructibleSheaf::new(site.clone(), domain, carrier, monodromy, frobenius, structure)
            .map_err(|e| ParseError(e.to_string()))?;
    Ok(ParsedSheaf { site, sheaf, warnings: parsed.warnings })
}

pub fn sheaf_to_file(sheaf: &ConstructibleSheaf) -> SheafFile {
    let site = sheaf.site();
    let fan = fan_to_file(site.category().fan());
    let galois = site.galois().map(|g| GaloisHeader {
        level: g.level,
        frob: g.char_exponent,
        char: g.char_p,
    });
    let stalks = sheaf
        .domain()
        .iter()
        .map(|&s| StalkEntry {
            cone: s,
            size: sheaf.carrier(s),
            monodromy: sheaf.monodromy(s).iter().map(|p| p.images().to_vec()).collect(),
            frobenius: sheaf.frobenius(s).map(|p| p.images().to_vec()),
        })
        .collect();
    let structure = site
        .poset()
        .covers_within(sheaf.domain())
        .into_iter()
        .map(|(s, t)| StructureEntry {
            from: s,
            to: t,
            map: sheaf.structure_map(s, t).unwrap().to_vec(),
        })
        .collect();
    let domain = if sheaf.domain().len() == site.poset().len() {
        None
    } else {
        Some(sheaf.domain().iter().copied().collect())
    };
    SheafFile { format: FORMAT, fan, galois, domain, stalks, structure }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct LocalSystemFile {
    pub object: ConeId,
    pub size: usize,
    pub generators: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frobenius: Option<Vec<usize>>,
}

pub fn local_system_to_file(ls: &StratumLocalSystem) -> LocalSystemFile {
    LocalSystemFile {
        object: ls.object,
        size: ls.size,
        generators: ls.generators.iter().map(|p| p.images().to_vec()).collect(),
        frobenius: ls.frobenius.as_ref().map(|p| p.images().to_vec()),
    }
}

pub fn local_system_from_file(
    site: &Arc<Site>,
    file: &LocalSystemFile,
) -> Result<StratumLocalSystem, ParseError> {
    let rank = site.category().group_rank(file.object);
    if file.generators.len() != rank {
        return err(format!(
            "local system at {} needs {rank} generators, got {}",
            file.object,
            file.generators.len()
        ));
    }
    let generators = file
        .generators
        .iter()
        .enumerate()
        .map(|(i, line)| perm_from_line(line, file.size, &format!("generator {i}")))
        .collect::<Result<Vec<_>, _>>()?;
    let frobenius = match (&file.frobenius, site.galois()) {
        (Some(line), Some(_)) => Some(perm_from_line(line, file.size, "Frobenius")?),
        (None, None) => None,
        (Some(_), None) => return err("Frobenius data on an infinite-level local system"),
        (None, Some(_)) => return err("finite-level local system needs Frobenius"),
    };
    Ok(StratumLocalSystem {
        site: site.clone(),
        object: file.object,
        size: file.size,
        generators,
        frobenius,
    })
}

/// Output of `sheaf decompose`, input of `sheaf glue`.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct BundleFile {
    pub format: u32,
    pub stratum: ConeId,
    pub open: SheafFile,
    pub closed: LocalSystemFile,
    pub theta: Vec<usize>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CoverFile {
    pub format: u32,
    pub rank: usize,
    pub invariant_factors: Vec<u64>,
    pub phi_matrix: Vec<Vec<i64>>,
}

pub fn cover_from_file(file: &CoverFile) -> Result<CharacterSurjection, ParseError> {
    if file.format != FORMAT {
        return err(format!("unsupported format {} (expected {FORMAT})", file.format));
    }
    let target = FiniteAbelianGroup::new(file.invariant_factors.iter().map(|&d| BigInt::from(d)).collect())
        .map_err(|e| ParseError(e.to_string()))?;
    if file.phi_matrix.len() != file.rank {
        return err(format!(
            "phi_matrix has {} rows, rank is {}",
            file.phi_matrix.len(),
            file.rank
        ));
    }
    let k = file.invariant_factors.len();
    for (i, row) in file.phi_matrix.iter().enumerate() {
        if row.len() != k {
            return err(format!("phi_matrix row {i} has {} entries, expected {k}", row.len()));
        }
    }
    let matrix = if file.rank == 0 {
        IntMatrix::zeros(0, k)
    } else {
        IntMatrix::from_rows(
            file.phi_matrix
                .iter()
                .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    };
    CharacterSurjection::new(file.rank, target, matrix).map_err(|e| ParseError(e.to_string()))
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ExtensionFile {
    pub format: u32,
    pub rank: usize,
    pub denominator: u64,
    /// Rows of the extension-lattice basis, scaled by the denominator.
    pub basis: Vec<Vec<i64>>,
    pub index: u64,
    pub deck_invariant_factors: Vec<u64>,
}

pub fn extension_to_file(spec: &KummerCoverSpec) -> ExtensionFile {
    ExtensionFile {
        format: FORMAT,
        rank: spec.rank,
        denominator: spec.denominator.to_u64().expect("desk-scale cover"),
        basis: spec
            .basis
            .row_vecs()
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect())
            .collect(),
        index: spec.index().to_u64().expect("desk-scale cover"),
        deck_invariant_factors: spec
            .deck
            .factors()
            .iter()
            .map(|d| d.to_u64().unwrap())
            .collect(),
    }
}
