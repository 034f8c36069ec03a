//! Strip-backend selection, including the external subprocess backend.

use std::io::Write;
use std::process::{Command, Stdio};

use pack3d::error::{Error, Result};
use pack3d::geometry::{verify_packing, BinSpec, Item, ItemTable, Packing, PackingKind};
use pack3d::io::{instance_to_json, parse_packing};
use pack3d::rational::parse_rational;
use pack3d::subroutines::{LichengBackend, StripBackend, StripBackendGuarantee};

use crate::BackendFlags;

pub fn backend_from_flags(flags: &BackendFlags) -> Result<Box<dyn StripBackend>> {
    match flags.backend.as_str() {
        "licheng" => Ok(Box::new(LichengBackend)),
        "external" => {
            let cmd = flags.backend_cmd.clone().ok_or_else(|| {
                Error::Precondition("--backend external requires --backend-cmd".into())
            })?;
            let guarantee = StripBackendGuarantee::new(
                parse_rational(&flags.backend_mult)?,
                parse_rational(&flags.backend_add)?,
                parse_rational(&flags.backend_hmax_coeff)?,
                false,
            )?;
            Ok(Box::new(ExternalBackend { cmd, guarantee }))
        }
        other => Err(Error::Parse(format!("unknown backend {other:?}"))),
    }
}

/// Runs an external command per strip-packing call: the item set goes to
/// stdin as instance JSON, a strip packing JSON is expected on stdout and
/// is re-verified before being trusted.
pub struct ExternalBackend {
    cmd: String,
    guarantee: StripBackendGuarantee,
}

impl StripBackend for ExternalBackend {
    fn name(&self) -> &str {
        "external"
    }

    fn guarantee(&self) -> StripBackendGuarantee {
        self.guarantee.clone()
    }

    fn pack_strip(&self, items: &[Item]) -> Result<Packing> {
        let table = ItemTable::new(items.to_vec())?;
        let instance = instance_to_json(&BinSpec::unit(), &table);
        let payload = serde_json::to_string(&instance)?;

        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.cmd)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()?;
        child
            .stdin
            .as_mut()
            .expect("piped stdin")
            .write_all(payload.as_bytes())?;
        let out = child.wait_with_output()?;
        if !out.status.success() {
            return Err(Error::Infeasible(format!(
                "external backend exited with {:?}",
                out.status.code()
            )));
        }
        let text = String::from_utf8_lossy(&out.stdout);
        let packing = parse_packing(&text, &BinSpec::unit())?;
        if !matches!(packing.kind, PackingKind::Strip(_)) {
            return Err(Error::Infeasible("external backend must return a strip packing".into()));
        }
        let report = verify_packing(&packing, &table)?;
        if !report.feasible {
            return Err(Error::Infeasible(format!(
                "external backend returned an infeasible packing ({} violations)",
                report.violations.len()
            )));
        }
        if packing.placements.len() != items.len() {
            return Err(Error::Infeasible(format!(
                "external backend placed {} of {} items",
                packing.placements.len(),
                items.len()
            )));
        }
        Ok(packing)
    }
}
