from pathlib import Path
from typing import AsyncGenerator

from sqlalchemy.ext.asyncio import AsyncEngine, AsyncSession, create_async_engine
from sqlalchemy.orm import sessionmaker
from sqlmodel import SQLModel

from app.config import DATABASE_URL, SQL_ECHO


def make_engine(url: str = DATABASE_URL) -> AsyncEngine:
    # file-backed sqlite needs its directory in place
    if url.startswith("sqlite") and ":memory:" not in url:
        db_path = url.split("///", 1)[-1]
        Path(db_path).parent.mkdir(parents=True, exist_ok=True)
    return create_async_engine(url, echo=SQL_ECHO)


def make_session_maker(engine: AsyncEngine) -> sessionmaker:
    return sessionmaker(bind=engine, class_=AsyncSession, expire_on_commit=False)


async def init_db(engine: AsyncEngine) -> None:
    async with engine.begin() as conn:
        await conn.run_sync(SQLModel.metadata.create_all)


async def get_session(engine: AsyncEngine) -> AsyncGenerator[AsyncSession, None]:
    async with make_session_maker(engine)() as session:
        yield session
