//! Account management. The first account is an admin that creates itself;
//! every later account or role change is an admin action.

use crate::engine::Engine;
use crate::error::EngineError;
use crate::event::{Event, RoleChanged, UserCreated};
use crate::ids::UserId;
use crate::model::{Role, User};

impl Engine {
    /// Creates the founding admin on an empty log.
    pub fn bootstrap_admin(
        &self,
        id: &UserId,
        name: impl Into<String>,
        email: impl Into<String>,
    ) -> Result<User, EngineError> {
        self.register_user(id, id, name, Role::Admin, email)
    }

    pub fn register_user(
        &self,
        actor: &UserId,
        id: &UserId,
        name: impl Into<String>,
        role: Role,
        email: impl Into<String>,
    ) -> Result<User, EngineError> {
        let (name, email) = (name.into(), email.into());
        let (_, state) = self.commit(actor, |_, _| {
            Ok(Event::UserCreated(UserCreated {
                user: id.clone(),
                name,
                role,
                email,
            }))
        })?;
        Ok(state.user(id)?.clone())
    }

    pub fn set_role(&self, actor: &UserId, user: &UserId, role: Role) -> Result<User, EngineError> {
        let (_, state) = self.commit(actor, |_, _| {
            Ok(Event::RoleChanged(RoleChanged {
                user: user.clone(),
                role,
            }))
        })?;
        Ok(state.user(user)?.clone())
    }
}
