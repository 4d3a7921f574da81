//! Small ledgers for unit tests.

use rand::{Rng, RngCore};

use crate::bilinear::BilinearGroup;
use crate::ledger::{AppendRequest, Chain, ChainVariant, VariableState, WarrantyKey, WarrantyRequest};
use crate::protocol::{keeper_setup, FileKeeper, SetupRequest, ShardEntry, UserKeypair};

pub(crate) struct Fixture<B: BilinearGroup> {
    pub chain: Chain<B>,
    pub state: VariableState<B>,
    pub keeper: FileKeeper<B>,
    pub users: Vec<UserKeypair<B>>,
    pub signer: WarrantyKey,
    /// Plaintext and encrypted entries per block, in block order.
    pub published: Vec<(Vec<u8>, Vec<ShardEntry>)>,
}

impl<B: BilinearGroup> Fixture<B> {
    pub fn new<R: RngCore>(block_bytes: usize, variant: ChainVariant, rng: &mut R) -> Self {
        let (params, shards, secret) =
            keeper_setup::<B, _>(SetupRequest { block_bytes }, rng).unwrap();
        Fixture {
            chain: Chain::new(params, variant, 4).unwrap(),
            state: VariableState::new(shards),
            keeper: FileKeeper::new(secret),
            users: (0..3).map(|_| UserKeypair::generate(rng)).collect(),
            signer: WarrantyKey::generate(rng),
            published: Vec::new(),
        }
    }

    /// Publishes a random message of random length; warranties cycle through
    /// every kind.
    pub fn publish<R: RngCore>(&mut self, rng: &mut R) -> u64 {
        let len = rng.gen_range(1..=self.chain.params().capacity());
        let mut message = vec![0u8; len];
        rng.fill_bytes(&mut message);
        self.publish_message(&message, rng)
    }

    pub fn publish_message<R: RngCore>(&mut self, message: &[u8], rng: &mut R) -> u64 {
        let b = self.chain.len() as u64 + 1;
        let user = &self.users[b as usize % self.users.len()];
        let token = self.keeper.issue_token(user.public()).unwrap();
        let payload = user.encrypt(&token, &self.state.shards, message, rng).unwrap();
        let warranty = match b % 4 {
            0 => WarrantyRequest::None,
            1 => WarrantyRequest::UserSignature(&self.signer),
            2 => WarrantyRequest::ProofOfWork,
            _ => WarrantyRequest::ThirdParty(&self.signer),
        };
        let request = AppendRequest {
            warranty,
            owner: Some(format!("user{}", b as usize % self.users.len())),
            locator: Some(format!("payloads/{b}")),
        };
        self.chain.append(&mut self.state, &payload, request).unwrap();
        self.published.push((message.to_vec(), payload.entries));
        b
    }

    pub fn owner_of(&self, b: u64) -> &UserKeypair<B> {
        &self.users[b as usize % self.users.len()]
    }

    pub fn update<R: RngCore>(&mut self, rng: &mut R) {
        crate::ledger::update_epoch(&mut self.state, &mut self.keeper, rng).unwrap();
    }
}
