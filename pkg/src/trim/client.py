"""Minimal service client used by the CLI.

By default requests run against an in-process ASGI instance of the
service, so the CLI needs no running server; pass a base URL to talk to a
remote one instead.
"""

from __future__ import annotations

import asyncio

import httpx


class ServiceError(Exception):
    """Non-2xx response from the service; message is the one-line detail."""


def call_service(path: str, payload: dict, server: str | None = None) -> dict:
    """POST a JSON payload and return the decoded JSON response."""
    if server is not None:
        with httpx.Client(base_url=server, timeout=300.0) as client:
            response = client.post(path, json=payload)
    else:
        response = asyncio.run(_call_inprocess(path, payload))
    if response.status_code != 200:
        raise ServiceError(_detail(response))
    return response.json()


async def _call_inprocess(path: str, payload: dict) -> httpx.Response:
    from .service import create_app  # deferred: keep CLI startup light

    transport = httpx.ASGITransport(app=create_app())
    async with httpx.AsyncClient(transport=transport, base_url="http://trim") as client:
        return await client.post(path, json=payload)


def _detail(response: httpx.Response) -> str:
    try:
        detail = response.json().get("detail")
    except ValueError:
        detail = None
    if isinstance(detail, str):
        return detail
    return f"service returned HTTP {response.status_code}: {response.text[:200]}"
