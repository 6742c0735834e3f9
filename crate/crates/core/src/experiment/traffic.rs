use super::{ScenarioConfig, Topology, Traffic};
use crate::ndn::Name;
use crate::sim::RandomStream;
use crate::{Error, NodeId, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Endpoint {
    pub node: NodeId,
    pub prefix: Name,
}

/// Which nodes run which application.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficPlan {
    pub consumers: Vec<Endpoint>,
    pub producers: Vec<Endpoint>,
}

impl TrafficPlan {
    pub fn prefixes(&self) -> Vec<Name> {
        let mut p: Vec<Name> = self.producers.iter().map(|e| e.prefix.clone()).collect();
        p.sort_by_key(|n| n.to_string());
        p.dedup();
        p
    }
}

fn prefix(s: &str) -> Name {
    s.parse().expect("static prefix")
}

/// Prefix served to consumer `i` and by producer `j`.
fn assign(cfg: &ScenarioConfig, consumers: usize, producers: usize) -> (Vec<Name>, Vec<Name>) {
    match cfg.traffic {
        Traffic::OneToOne => {
            let names: Vec<Name> = (0..consumers).map(|i| prefix(&format!("/p{i}"))).collect();
            (names.clone(), names)
        }
        Traffic::ManyToOne | Traffic::ManyToMany => {
            let ab = [prefix("/A"), prefix("/B")];
            let half_c = consumers / 2;
            let half_p = producers / 2;
            (
                (0..consumers).map(|i| ab[usize::from(i >= half_c)].clone()).collect(),
                (0..producers).map(|j| ab[usize::from(j >= half_p)].clone()).collect(),
            )
        }
    }
}

/// Places applications for one seed. Linear chains put the consumer at one
/// end and the producer at the other; the grid draws distinct nodes from the
/// `placement` stream unless the config pins them.
pub fn build_traffic(cfg: &ScenarioConfig, seed: u64) -> Result<TrafficPlan> {
    cfg.validate()?;
    let nc = cfg.effective_consumers();
    let np = cfg.effective_producers();
    if nc + np > cfg.nodes {
        return Err(Error::Config(format!("{} endpoints exceed {} nodes", nc + np, cfg.nodes)));
    }
    let (cp, pp) = assign(cfg, nc, np);

    let (cnodes, pnodes): (Vec<NodeId>, Vec<NodeId>) = if cfg.topology != Topology::Grid {
        (vec![0], vec![cfg.nodes - 1])
    } else {
        let mut order: Vec<NodeId> = (0..cfg.nodes).collect();
        RandomStream::derive(seed, "placement").shuffle(&mut order);
        (
            cfg.consumer_nodes.clone().unwrap_or_else(|| order[..nc].to_vec()),
            cfg.producer_nodes.clone().unwrap_or_else(|| order[nc..nc + np].to_vec()),
        )
    };

    let pair = |nodes: Vec<NodeId>, prefixes: Vec<Name>| {
        nodes
            .into_iter()
            .zip(prefixes)
            .map(|(node, prefix)| Endpoint { node, prefix })
            .collect()
    };
    Ok(TrafficPlan {
        consumers: pair(cnodes, cp),
        producers: pair(pnodes, pp),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ScenarioConfig {
        ScenarioConfig::parse(text).unwrap()
    }

    #[test]
    fn one_to_one_has_ten_prefixes() {
        let plan = build_traffic(&cfg(""), 1).unwrap();
        assert_eq!(plan.consumers.len() + plan.producers.len(), 20);
        assert_eq!(plan.prefixes().len(), 10);
        for (c, p) in plan.consumers.iter().zip(&plan.producers) {
            assert_eq!(c.prefix, p.prefix);
        }
        let mut nodes: Vec<_> = plan.consumers.iter().chain(&plan.producers).map(|e| e.node).collect();
        nodes.sort_unstable();
        nodes.dedup();
        assert_eq!(nodes.len(), 20);
    }

    #[test]
    fn many_to_one_has_two_producers() {
        let plan = build_traffic(&cfg("traffic = \"m-1\""), 1).unwrap();
        assert_eq!(plan.producers.len(), 2);
        assert_eq!(plan.prefixes(), vec![prefix("/A"), prefix("/B")]);
        assert_eq!(plan.consumers.iter().filter(|c| c.prefix == prefix("/A")).count(), 5);
    }

    #[test]
    fn many_to_many_five_producers_per_prefix() {
        let plan = build_traffic(&cfg("traffic = \"m-m\""), 1).unwrap();
        assert_eq!(plan.producers.iter().filter(|p| p.prefix == prefix("/A")).count(), 5);
        assert_eq!(plan.consumers.iter().filter(|c| c.prefix == prefix("/B")).count(), 5);
    }

    #[test]
    fn placement_is_seeded() {
        let c = cfg("");
        assert_eq!(build_traffic(&c, 4).unwrap(), build_traffic(&c, 4).unwrap());
        assert_ne!(build_traffic(&c, 4).unwrap(), build_traffic(&c, 5).unwrap());
    }

    #[test]
    fn too_many_endpoints_rejected() {
        assert!(build_traffic(&cfg("consumers = 30\nproducers = 30"), 1).is_err());
    }
}
